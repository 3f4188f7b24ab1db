"""Reflection layer: K-matrices, double-row monodromy, transfer matrices, Hamiltonian.

The double-row monodromy is assembled as the two-sided product

    R_{a1}(u/v_1) ... R_{aN}(u/v_N) K^-_a(u) R_{aN}(u v_N) ... R_{a1}(u v_1)

which carries the ``(-1)^N`` quantum-determinant normalization implicitly and
needs no matrix inversion.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .tensor import (
    FINITE_DIFF_TOL,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    embed_local,
    identity,
    relative_residual,
)
from .vertex import (
    BulkParams,
    Monodromy,
    PoleError,
    build_monodromy,
    build_r,
    check_sites,
    fn_b,
    r_aux_site,
)

CASES = ("diag", "upper_upper", "lower_upper", "general_triangular")


@dataclass(frozen=True)
class RightBoundary:
    nu_plus: complex = 1.0
    nu_minus: complex = 1.0
    tau: complex = 0.0
    tau_tilde: complex = 0.0


@dataclass(frozen=True)
class LeftBoundary:
    eps_plus: complex = 1.0
    eps_minus: complex = 1.0
    kappa: complex = 0.0
    kappa_tilde: complex = 0.0


@dataclass(frozen=True)
class ModelParams:
    bulk: BulkParams
    left: LeftBoundary = field(default_factory=LeftBoundary)
    right: RightBoundary = field(default_factory=RightBoundary)

    @property
    def q(self) -> complex:
        return self.bulk.q

    @property
    def n(self) -> int:
        return self.bulk.n

    @property
    def v(self) -> tuple[complex, ...]:
        return self.bulk.v

    def with_left(self, **changes) -> "ModelParams":
        return replace(self, left=replace(self.left, **changes))

    def with_right(self, **changes) -> "ModelParams":
        return replace(self, right=replace(self.right, **changes))

    def homogeneous(self) -> "ModelParams":
        return replace(self, bulk=BulkParams(self.q, (1.0,) * self.n))


# ---------------------------------------------------------------------------
# scalar building blocks


def fn_c(u: complex) -> complex:
    return u**2 - u**-2


def fn_phi(u: complex, q: complex) -> complex:
    den = fn_b(q * u * u, q)
    if den == 0:
        raise PoleError("phi(u): b(q u^2) = 0")
    return fn_b(q * q * u * u, q) / den


def k_minus(u: complex, right: RightBoundary) -> complex:
    return right.nu_minus * u + right.nu_plus / u


def k_plus(u: complex, left: LeftBoundary) -> complex:
    return left.eps_plus * u + left.eps_minus / u


def lambda_vacuum(u: complex, p: ModelParams) -> complex:
    """Vacuum eigenvalue factor prod_i b(q u / v_i) b(q u v_i)."""
    q = p.q
    return complex(np.prod([fn_b(q * u / vi, q) * fn_b(q * u * vi, q) for vi in p.v])) if p.n else 1.0 + 0j


# ---------------------------------------------------------------------------
# K-matrices and reflection equations


def build_k_minus(u: complex, right: RightBoundary) -> np.ndarray:
    c = fn_c(u)
    return np.array(
        [[k_minus(u, right), right.tau * c], [right.tau_tilde * c, k_minus(1 / u, right)]],
        dtype=complex,
    )


def build_k_plus(u: complex, left: LeftBoundary, q: complex) -> np.ndarray:
    c = fn_c(q * u)
    return np.array(
        [[k_plus(q * u, left), left.kappa_tilde * c], [left.kappa * c, k_plus(1 / (q * u), left)]],
        dtype=complex,
    )


def re_residual(u1: complex, u2: complex, right: RightBoundary, q: complex) -> float:
    """Residual of the reflection equation for K^-."""
    i2 = np.eye(2)
    k1 = np.kron(build_k_minus(u1, right), i2)
    k2 = np.kron(i2, build_k_minus(u2, right))
    r_minus = build_r(u1 / u2, q)
    r_plus = build_r(u1 * u2, q)
    return relative_residual(r_minus @ k1 @ r_plus @ k2, k2 @ r_plus @ k1 @ r_minus)


def dre_residual(u1: complex, u2: complex, left: LeftBoundary, q: complex) -> float:
    """Residual of the dual reflection equation for K^+."""
    i2 = np.eye(2)
    k1 = np.kron(build_k_plus(u1, left, q), i2)
    k2 = np.kron(i2, build_k_plus(u2, left, q))
    r_minus = build_r(u2 / u1, q)
    r_plus = build_r(q**-2 / (u1 * u2), q)
    return relative_residual(r_minus @ k1 @ r_plus @ k2, k2 @ r_plus @ k1 @ r_minus)


# ---------------------------------------------------------------------------
# double-row monodromy


class DoubleRowEntries(NamedTuple):
    """Operators A, B, C, D at spectral point ``u``; D excludes the A/b(qu^2) part."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    u: complex


def double_row_full(u: complex, p: ModelParams) -> np.ndarray:
    """K_a(u) on aux (x) quantum, auxiliary space as leftmost factor."""
    n, q = p.n, p.q
    check_sites(n)
    full = np.eye(2 ** (n + 1), dtype=complex)
    for site, vk in enumerate(p.v, start=1):
        full = full @ r_aux_site(u / vk, q, site, n)
    full = full @ np.kron(build_k_minus(u, p.right), np.eye(2**n))
    for site in range(n, 0, -1):
        full = full @ r_aux_site(u * p.v[site - 1], q, site, n)
    return full


def build_double_row(u: complex, p: ModelParams) -> DoubleRowEntries:
    if p.right.tau_tilde != 0:
        raise ValueError("double-row entries are only defined for tau_tilde = 0")
    q = p.q
    den = fn_b(q * u * u, q)
    if abs(den) < 1e-14:
        raise PoleError("b(q u^2) = 0: D is undefined at this point")
    k = Monodromy.from_full(double_row_full(u, p))
    return DoubleRowEntries(k.l11, k.l12, k.l21, k.l22 - k.l11 / den, u)


def double_row_from_lij(u: complex, p: ModelParams) -> DoubleRowEntries:
    """A, B, C, D assembled from l_ij products (independent cross-check).

    The C entry uses l22 where a printed variant of this formula has l11;
    the l22 form is the one that reproduces the dressed monodromy.
    """
    q = p.q
    w = 1 / (q * u)
    s = (-1) ** p.n
    tau = p.right.tau
    km = lambda x: k_minus(x, p.right)  # noqa: E731
    b = lambda x: fn_b(x, q)  # noqa: E731
    ph = lambda x: fn_phi(x, q)  # noqa: E731
    lu = build_monodromy(u, p.bulk)
    lw = build_monodromy(w, p.bulk)
    c = fn_c(u)
    a_op = s * (km(u) * lu.l11 @ lw.l22 - km(1 / u) * lu.l12 @ lw.l21) + s * tau * c * (
        lu.l21 @ lw.l11 / b(q * u * u) - ph(u) * lw.l21 @ lu.l11
    )
    b_op = s * ph(w) * (km(w) * lu.l12 @ lw.l11 - km(u) * lw.l12 @ lu.l11) + s * tau * c * lu.l11 @ lw.l11
    c_op = s * ph(w) * (km(q * u) * lu.l21 @ lw.l22 - km(1 / u) * lw.l21 @ lu.l22) - s * tau * c * lu.l21 @ lw.l21
    d_op = s * ph(w) * (km(w) * lw.l11 @ lu.l22 - km(q * u) * lw.l12 @ lu.l21) + s * tau * fn_c(w) * ph(w) * (
        lw.l21 @ lu.l11 / b(1 / (q * u * u)) - ph(w) * lu.l21 @ lw.l11
    )
    return DoubleRowEntries(a_op, b_op, c_op, d_op, u)


# ---------------------------------------------------------------------------
# transfer matrices


def _check_case(case: str, p: ModelParams) -> None:
    if case not in CASES:
        raise ValueError(f"unknown transfer case {case!r}; expected one of {CASES}")
    left, right = p.left, p.right
    if right.tau_tilde != 0:
        raise ValueError("triangular transfer matrices need tau_tilde = 0")
    if case == "diag" and (left.kappa != 0 or left.kappa_tilde != 0):
        raise ValueError("case 'diag' needs kappa = kappa_tilde = 0")
    if case == "upper_upper" and left.kappa != 0:
        raise ValueError("case 'upper_upper' needs kappa = 0")
    if case == "lower_upper" and left.kappa_tilde != 0:
        raise ValueError("case 'lower_upper' needs kappa_tilde = 0")


def transfer_from_entries(ops: DoubleRowEntries, p: ModelParams, diagonal_only: bool = False) -> np.ndarray:
    u, q, left = ops.u, p.q, p.left
    t = fn_phi(u, q) * k_plus(u, left) * ops.A + k_plus(1 / (q * u), left) * ops.D
    if not diagonal_only:
        c = fn_c(q * u)
        if left.kappa != 0:
            t = t + c * left.kappa * ops.B
        if left.kappa_tilde != 0:
            t = t + c * left.kappa_tilde * ops.C
    return t


def build_transfer(u: complex, p: ModelParams, case: str) -> np.ndarray:
    """t(u) = phi(u) k+(u) A + k+(1/(qu)) D + c(qu) (kappa B + kappa~ C)."""
    _check_case(case, p)
    return transfer_from_entries(build_double_row(u, p), p)


def diagonal_transfer(u: complex, p: ModelParams) -> np.ndarray:
    """t_d(u), the A/D part of the transfer matrix whatever the left boundary."""
    return transfer_from_entries(build_double_row(u, p), p, diagonal_only=True)


def transfer_by_trace(u: complex, p: ModelParams) -> np.ndarray:
    """tr_a K^+_a(u) K_a(u), computed without the A/B/C/D split."""
    d = 2**p.n
    kp = np.kron(build_k_plus(u, p.left, p.q), np.eye(d))
    prod = kp @ double_row_full(u, p)
    return prod[:d, :d] + prod[d:, d:]


# ---------------------------------------------------------------------------
# Hamiltonian


class HamiltonianParams(NamedTuple):
    epsilon: complex
    kappa_minus: complex
    kappa_plus: complex
    nu: complex
    tau_minus: complex
    tau_plus: complex


def map_boundary_params(left: LeftBoundary, right: RightBoundary, q: complex) -> HamiltonianParams:
    """K-matrix constants to the boundary fields of the spin-chain Hamiltonian."""
    se = left.eps_plus + left.eps_minus
    sn = right.nu_plus + right.nu_minus
    if se == 0:
        raise ZeroDivisionError("eps_plus + eps_minus = 0")
    if sn == 0:
        raise ZeroDivisionError("nu_plus + nu_minus = 0")
    d = q - 1 / q
    return HamiltonianParams(
        epsilon=d / 2 * (left.eps_plus - left.eps_minus) / se,
        kappa_minus=2 * d / se * left.kappa,
        kappa_plus=2 * d / se * left.kappa_tilde,
        nu=d / 2 * (right.nu_minus - right.nu_plus) / sn,
        tau_minus=2 * d / sn * right.tau_tilde,
        tau_plus=2 * d / sn * right.tau,
    )


def build_hamiltonian_direct(n: int, delta: complex, hp: HamiltonianParams) -> np.ndarray:
    """Open XXZ Hamiltonian with boundary fields on sites 1 and n."""
    if n < 1:
        raise ValueError("Hamiltonian needs n >= 1")
    h = (
        hp.epsilon * embed_local(SIGMA_Z, 1, n)
        + hp.kappa_minus * embed_local(SIGMA_MINUS, 1, n)
        + hp.kappa_plus * embed_local(SIGMA_PLUS, 1, n)
        + hp.nu * embed_local(SIGMA_Z, n, n)
        + hp.tau_minus * embed_local(SIGMA_MINUS, n, n)
        + hp.tau_plus * embed_local(SIGMA_PLUS, n, n)
    )
    for k in range(1, n):
        for op, coef in ((SIGMA_X, 1.0), (SIGMA_Y, 1.0), (SIGMA_Z, delta)):
            h = h + coef * embed_local(op, k, n) @ embed_local(op, k + 1, n)
    return h


def hamiltonian_shift(n: int, q: complex) -> complex:
    """Constant subtracted from the logarithmic derivative of t(u) at u = 1."""
    return n * (q + 1 / q) / 2 + (q - 1 / q) ** 2 / (2 * (q + 1 / q))


def derivative(fn, x0: complex, step: float = 1e-3):
    """Fourth-order central difference with one Richardson refinement."""

    def d4(h):
        return (-fn(x0 + 2 * h) + 8 * fn(x0 + h) - 8 * fn(x0 - h) + fn(x0 - 2 * h)) / (12 * h)

    coarse = d4(step)
    fine = d4(step / 2)
    return (16 * fine - coarse) / 15


def build_hamiltonian_from_transfer(p: ModelParams, tol: float = FINITE_DIFF_TOL) -> np.ndarray:
    """H from the logarithmic derivative of the homogeneous transfer matrix at u = 1.

    Uses the full trace form of t(u), so any triangular or general left
    boundary is accepted as long as tau_tilde = 0.
    """
    ph = p.homogeneous()
    q, n = ph.q, ph.n
    t1 = transfer_by_trace(1.0, ph)
    d = t1.shape[0]
    scalar = complex(np.trace(t1) / d)
    if scalar == 0 or relative_residual(t1, scalar * np.eye(d)) > tol:
        raise ValueError("t(1) is not proportional to the identity (degenerate boundary parameters)")
    dt = derivative(lambda x: transfer_by_trace(x, ph), 1.0)
    return (q - 1 / q) / 2 * dt / scalar - hamiltonian_shift(n, q) * identity(n)


def hamiltonian_for(p: ModelParams) -> np.ndarray:
    """Direct Hamiltonian whose boundary fields come from the K-matrix constants."""
    return build_hamiltonian_direct(p.n, p.bulk.delta, map_boundary_params(p.left, p.right, p.q))


# ---------------------------------------------------------------------------
# m-shifted operators


class UpperModified(NamedTuple):
    A: np.ndarray
    D: np.ndarray
    B: np.ndarray


class LowerModified(NamedTuple):
    A: np.ndarray
    D: np.ndarray


def _shift_ratio(coef: complex, p: ModelParams) -> complex:
    em = p.left.eps_minus
    if em == 0:
        raise ZeroDivisionError("m-shifted operators need eps_minus != 0")
    return coef / (p.q * em)


def modified_upper_from(ops: DoubleRowEntries, m: int, p: ModelParams) -> UpperModified:
    q, u = p.q, ops.u
    r = q**m * _shift_ratio(p.left.kappa_tilde, p)
    a_t = ops.A - r / u * ops.C
    d_t = ops.D + r * q * u * fn_phi(u, q) * ops.C
    s = q**2 * r
    b_t = (
        ops.B
        + s * (q * u * fn_b(u * u, q) / fn_b(q * u * u, q) * ops.A - ops.D / u)
        - s**2 * ops.C
    )
    return UpperModified(a_t, d_t, b_t)


def build_modified_ops_upper(u: complex, m: int, p: ModelParams) -> UpperModified:
    """Operators with the kappa~ C admixture used for two upper-triangular boundaries."""
    return modified_upper_from(build_double_row(u, p), m, p)


def modified_lower_from(ops: DoubleRowEntries, m: int, p: ModelParams) -> LowerModified:
    q, u = p.q, ops.u
    r = q**m * _shift_ratio(p.left.kappa, p)
    return LowerModified(ops.A - r / u * ops.B, ops.D + r * q * u * fn_phi(u, q) * ops.B)


def build_modified_ops_lower(u: complex, m: int, p: ModelParams) -> LowerModified:
    """Operators with the kappa B admixture that make t_lo/up diagonal in form."""
    return modified_lower_from(build_double_row(u, p), m, p)
