"""Operator identities of the boundary algebra, as residual functions.

Each function builds both sides of an identity as dense matrices (or vectors)
and returns relative residuals keyed by a short relation name.
"""

from __future__ import annotations

import numpy as np

from .boundary import (
    ModelParams,
    build_double_row,
    build_modified_ops_lower,
    build_modified_ops_upper,
    build_transfer,
    modified_lower_from,
    modified_upper_from,
)
from .functions import ScalarFunctions
from .tensor import basis_vector, commutator, relative_residual

SHIFTS = (-4, -2, 0, 2)
RELATION_NAMES = ("AB", "CA", "DB", "CD", "CB", "AD", "AA", "DD", "BB", "CC")


def _vec_residual(lhs: np.ndarray, rhs: np.ndarray) -> float:
    scale = max(np.linalg.norm(lhs), np.linalg.norm(rhs), 1e-300)
    return float(np.linalg.norm(lhs - rhs) / scale)


def reflection_algebra_residuals(u: complex, v: complex, p: ModelParams) -> dict[str, float]:
    """The ten exchange relations between A, B, C, D at (u, v)."""
    fx = ScalarFunctions(p)
    A, B, C, D, _ = build_double_row(u, p)
    A2, B2, C2, D2, _ = build_double_row(v, p)
    f, g, w, h = fx.f(u, v), fx.g(u, v), fx.w(u, v), fx.h(u, v)
    k, n = fx.k_ex(u, v), fx.n(u, v)
    s, x, y, r, pp = fx.s(u, v), fx.x(u, v), fx.y(u, v), fx.r(u, v), fx.p_fn(u, v)
    rel = relative_residual
    cross = B @ C2 - B2 @ C
    return {
        "AB": rel(A @ B2, f * B2 @ A + g * B @ A2 + w * B @ D2),
        "CA": rel(C2 @ A, f * A @ C2 + g * A2 @ C + w * D2 @ C),
        "DB": rel(D @ B2, h * B2 @ D + k * B @ D2 + n * B @ A2),
        "CD": rel(C2 @ D, h * D @ C2 + k * D2 @ C + n * A2 @ C),
        "CB": rel(C @ B2, B2 @ C + s * A @ A2 + x * A2 @ A + y * D @ A2 + r * A @ D2 + pp * A2 @ D + w * D @ D2),
        "AD": rel(A @ D2, D2 @ A + fx.k_ex(v, u) * cross),
        "AA": rel(A @ A2, A2 @ A + w * cross),
        "DD": rel(D @ D2, D2 @ D - fx.phi(u) * fx.phi(v) * w * cross),
        "BB": rel(B @ B2, B2 @ B),
        "CC": rel(C @ C2, C2 @ C),
    }


def vacuum_action_residuals(u: complex, p: ModelParams) -> dict[str, float]:
    """A, D diagonal and C annihilating on the all-up vector."""
    fx = ScalarFunctions(p)
    ops = build_double_row(u, p)
    om = basis_vector(p.n, 0)
    w = fx.cross(u)
    a_val = fx.k_minus(u) * fx.big_lambda(u)
    d_val = fx.phi(w) * fx.k_minus(w) * fx.big_lambda(w)
    c_scale = max(np.linalg.norm(ops.C, 2), 1e-300)
    return {
        "A_vac": _vec_residual(ops.A @ om, a_val * om),
        "D_vac": _vec_residual(ops.D @ om, d_val * om),
        "C_vac": float(np.linalg.norm(ops.C @ om) / c_scale),
    }


def covacuum_nilpotency_residual(u: complex, p: ModelParams) -> float:
    """||B(u)|all down>|| / ||B(u)||_2; vanishes for a diagonal right boundary."""
    b = build_double_row(u, p).B
    return float(np.linalg.norm(b @ basis_vector(p.n, 2**p.n - 1)) / max(np.linalg.norm(b, 2), 1e-300))


def transfer_commutator_residual(u: complex, v: complex, p: ModelParams, case: str) -> float:
    tu = build_transfer(u, p, case)
    tv = build_transfer(v, p, case)
    scale = max(np.linalg.norm(tu) * np.linalg.norm(tv), 1e-300)
    return float(np.linalg.norm(commutator(tu, tv)) / scale)


def transfer_rewrite_residual(u: complex, p: ModelParams, case: str) -> float:
    """t(u) = phi(u) k+(u) X(u, 0) + k+(1/(qu)) Y(u, 0) with shifted diagonal operators."""
    fx = ScalarFunctions(p)
    if case == "upper_upper":
        mod = build_modified_ops_upper(u, 0, p)
    elif case == "lower_upper":
        mod = build_modified_ops_lower(u, 0, p)
    else:
        raise ValueError(f"no shifted rewrite for case {case!r}")
    rhs = fx.phi(u) * fx.k_plus(u) * mod.A + fx.k_plus(fx.cross(u)) * mod.D
    return relative_residual(build_transfer(u, p, case), rhs)


def shifted_upper_residuals(u: complex, v: complex, m: int, p: ModelParams) -> dict[str, float]:
    """Exchange relations of the upper shifted operators at shift m."""
    fx = ScalarFunctions(p)
    ou, ov = build_double_row(u, p), build_double_row(v, p)

    def mod(ops, shift):
        return modified_upper_from(ops, shift, p)

    f, g, w = fx.f(u, v), fx.g(u, v), fx.w(u, v)
    h, k, n = fx.h(u, v), fx.k_ex(u, v), fx.n(u, v)
    um, vm = mod(ou, m), mod(ov, m)
    rel = relative_residual
    return {
        "BB": rel(um.B @ mod(ov, m - 2).B, vm.B @ mod(ou, m - 2).B),
        "AB": rel(mod(ou, m + 2).A @ vm.B, f * vm.B @ um.A + g * um.B @ vm.A + w * um.B @ vm.D),
        "DB": rel(mod(ou, m + 2).D @ vm.B, h * vm.B @ um.D + k * um.B @ vm.D + n * um.B @ vm.A),
    }


def shifted_lower_residuals(u: complex, v: complex, m: int, p: ModelParams) -> dict[str, float]:
    """Exchange relations of the lower shifted operators with B at shift m."""
    fx = ScalarFunctions(p)
    ou, ov = build_double_row(u, p), build_double_row(v, p)
    bu, bv = ou.B, ov.B
    lu2 = modified_lower_from(ou, m + 2, p)
    lu, lv = modified_lower_from(ou, m, p), modified_lower_from(ov, m, p)
    f, g, w = fx.f(u, v), fx.g(u, v), fx.w(u, v)
    h, k, n = fx.h(u, v), fx.k_ex(u, v), fx.n(u, v)
    rel = relative_residual
    return {
        "AB": rel(lu2.A @ bv, f * bv @ lu.A + g * bu @ lv.A + w * bu @ lv.D),
        "DB": rel(lu2.D @ bv, h * bv @ lu.D + k * bu @ lv.D + n * bu @ lv.A),
    }


def shifted_vacuum_residuals(u: complex, m: int, p: ModelParams) -> dict[str, float]:
    """Actions of the shifted diagonal operators on the all-up vector.

    Upper operators act diagonally; lower ones pick up a B(u)|Omega> term.
    Keys are present only for the triangularity the parameters allow.
    """
    fx = ScalarFunctions(p)
    ops = build_double_row(u, p)
    om = basis_vector(p.n, 0)
    w = fx.cross(u)
    a_val = fx.k_minus(u) * fx.big_lambda(u)
    d_val = fx.phi(w) * fx.k_minus(w) * fx.big_lambda(w)
    out = {}
    if p.left.kappa == 0:
        up = modified_upper_from(ops, m, p)
        out["A_up_vac"] = _vec_residual(up.A @ om, a_val * om)
        out["D_up_vac"] = _vec_residual(up.D @ om, d_val * om)
    if p.left.kappa_tilde == 0:
        lo = modified_lower_from(ops, m, p)
        coef = p.q**m * p.left.kappa / (p.q * p.left.eps_minus)
        b_om = ops.B @ om
        out["A_lo_vac"] = _vec_residual(lo.A @ om, a_val * om - coef / u * b_om)
        out["D_lo_vac"] = _vec_residual(lo.D @ om, d_val * om + coef * p.q * u * fx.phi(u) * b_om)
    return out
