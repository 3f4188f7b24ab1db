"""Vacua, Bethe vectors, off-shell actions and scalar products."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .bethe import (
    RootSet,
    bethe_residual_d,
    bethe_residual_g,
    lambda_d,
    lambda_g,
    zd_partition,
)
from .boundary import (
    ModelParams,
    build_double_row,
    build_modified_ops_upper,
    build_transfer,
    diagonal_transfer,
    fn_c,
)
from .functions import ScalarFunctions
from .tensor import basis_vector, check_sites
from .vertex import build_monodromy, vacuum_lambdas


@dataclass(frozen=True)
class BetheVector:
    state: np.ndarray
    roots: RootSet
    case: str


def vacuum(n: int) -> np.ndarray:
    """All spins up: the first basis vector."""
    check_sites(n)
    return basis_vector(n, 0)


def covacuum(n: int) -> np.ndarray:
    """All spins down: the last basis vector."""
    check_sites(n)
    return basis_vector(n, 2**n - 1)


def _apply_b(us: Sequence[complex], p: ModelParams, vec: np.ndarray) -> np.ndarray:
    for u in reversed(list(us)):
        vec = build_double_row(u, p).B @ vec
    return vec


def build_phi_d(us: Sequence[complex], p: ModelParams) -> BetheVector:
    """B(u_1) ... B(u_M) |Omega>."""
    us = list(us)
    if len(us) > p.n:
        raise ValueError(f"at most N = {p.n} roots, got {len(us)}")
    return BetheVector(_apply_b(us, p, vacuum(p.n)), RootSet(us, "diag"), "diag")


def build_phi_up(us: Sequence[complex], p: ModelParams) -> BetheVector:
    """B~(u_1, -2) B~(u_2, -4) ... B~(u_M, -2M) |Omega>."""
    if p.left.kappa != 0:
        raise ValueError("build_phi_up needs an upper-triangular left boundary (kappa = 0)")
    us = list(us)
    if len(us) > p.n:
        raise ValueError(f"at most N = {p.n} roots, got {len(us)}")
    vec = vacuum(p.n)
    for j in range(len(us), 0, -1):
        vec = build_modified_ops_upper(us[j - 1], -2 * j, p).B @ vec
    return BetheVector(vec, RootSet(us, "upper_upper"), "upper_upper")


def build_phi_lo_up(us: Sequence[complex], p: ModelParams) -> BetheVector:
    """B(u_1) ... B(u_N) |Omega> with exactly N roots."""
    us = list(us)
    if len(us) != p.n:
        raise ValueError(f"lower/upper Bethe vector needs exactly N = {p.n} roots, got {len(us)}")
    if p.left.kappa_tilde != 0:
        raise ValueError("build_phi_lo_up needs a lower-triangular left boundary (kappa_tilde = 0)")
    return BetheVector(_apply_b(us, p, vacuum(p.n)), RootSet(us, "lower_upper"), "lower_upper")


_BUILDERS = {"diag": build_phi_d, "upper_upper": build_phi_up, "lower_upper": build_phi_lo_up}


def build_bethe_vector(us: Sequence[complex], p: ModelParams, case: str) -> BetheVector:
    return _BUILDERS[case](us, p)


def creation_operators(us: Sequence[complex], p: ModelParams, case: str) -> list[np.ndarray]:
    """The operators applied to |Omega>, leftmost first."""
    if case == "upper_upper":
        return [build_modified_ops_upper(u, -2 * j, p).B for j, u in enumerate(us, start=1)]
    return [build_double_row(u, p).B for u in us]


def null_ratio(us: Sequence[complex], p: ModelParams, case: str) -> float:
    """||Phi|| / prod ||B_j||_2, a scale-free measure of how far Phi is from zero."""
    ops = creation_operators(list(us), p, case)
    vec = vacuum(p.n)
    for op in reversed(ops):
        vec = op @ vec
    scale = float(np.prod([np.linalg.norm(op, 2) for op in ops])) if ops else 1.0
    return float(np.linalg.norm(vec) / scale) if scale > 0 else 0.0


def _replaced(us: Sequence[complex], i: int, u: complex) -> list[complex]:
    out = list(us)
    out[i] = u
    return out


def offshell_residual(lhs: np.ndarray, terms: Sequence[np.ndarray]) -> float:
    """||lhs - sum(terms)|| scaled by the largest norm among lhs and the terms."""
    total = np.sum(terms, axis=0) if len(terms) else np.zeros_like(lhs)
    scale = max([np.linalg.norm(lhs)] + [np.linalg.norm(t) for t in terms])
    diff = np.linalg.norm(lhs - total)
    return float(diff / scale) if scale > 0 else float(diff)


def offshell_terms(u: complex, us: Sequence[complex], p: ModelParams, case: str, branch: str = "total"):
    """Right-hand side of the off-shell action as a list of vectors.

    ``branch`` selects which eigenvalue/residual pair is used: ``"d"`` (diagonal
    part), ``"g"`` (creation-operator part, lower/upper only) or ``"total"``.
    """
    fx = ScalarFunctions(p)
    us = list(us)
    build = _BUILDERS[case]
    lam = 0.0
    resid = np.zeros(len(us), dtype=complex)
    if branch in ("d", "total"):
        lam += lambda_d(u, us, p)
        resid += [bethe_residual_d(i, us, p) for i in range(len(us))]
    if branch in ("g", "total") and case == "lower_upper":
        lam += lambda_g(u, us, p)
        resid += [bethe_residual_g(i, us, p) for i in range(len(us))]
    terms = [lam * build(us, p).state]
    for i, ui in enumerate(us):
        terms.append(fx.F(u, ui) * resid[i] * build(_replaced(us, i, u), p).state)
    return terms


def offshell_transfer_residual(u: complex, us: Sequence[complex], p: ModelParams, case: str) -> float:
    """t(u) Phi(us) against Lambda Phi + sum_i F E_i Phi(u, us_i)."""
    phi = build_bethe_vector(us, p, case).state
    lhs = build_transfer(u, p, case) @ phi
    return offshell_residual(lhs, offshell_terms(u, us, p, case))


def creation_action_residual(u: complex, us: Sequence[complex], p: ModelParams) -> float:
    """kappa c(qu) B(u) Phi(us) against Lambda_g Phi + sum_i F E_g Phi(u, us_i)."""
    phi = build_phi_lo_up(us, p).state
    lhs = p.left.kappa * fn_c(p.q * u) * (build_double_row(u, p).B @ phi)
    return offshell_residual(lhs, offshell_terms(u, us, p, "lower_upper", branch="g"))


def split_transfer_residual(u: complex, us: Sequence[complex], p: ModelParams) -> float:
    """Lower/upper action written as diagonal off-shell part plus kappa c(qu) B(u) Phi."""
    phi = build_phi_lo_up(us, p).state
    lhs = build_transfer(u, p, "lower_upper") @ phi
    terms = offshell_terms(u, us, p, "lower_upper", branch="d")
    terms.append(p.left.kappa * fn_c(p.q * u) * (build_double_row(u, p).B @ phi))
    return offshell_residual(lhs, terms)


def diagonal_offshell_residual(u: complex, us: Sequence[complex], p: ModelParams) -> float:
    """t_d(u) Phi_d(us) against the diagonal off-shell expansion (any M <= N)."""
    phi = build_phi_d(us, p).state
    lhs = diagonal_transfer(u, p) @ phi
    return offshell_residual(lhs, offshell_terms(u, us, p, "diag", branch="d"))


# ---------------------------------------------------------------------------
# scalar products


def scalar_product_sup(ws: Sequence[complex], us: Sequence[complex], p: ModelParams) -> complex:
    """<Omega^| B(ws) B(us) |Omega> by direct matrix evaluation."""
    vec = _apply_b(list(ws) + list(us), p, vacuum(p.n))
    return complex(vec[-1])


def scalar_product_recursive(ws: Sequence[complex], us: Sequence[complex], p: ModelParams) -> complex:
    """Same scalar product from the off-shell creation action, recursively.

    Below N creation operators the overlap vanishes, at N it is the
    reflecting-end partition function, and above N one operator B(w) is
    removed with the action of B on an N-root vector:

        B(w) Phi(u) = [Lambda_g(w, u) Phi(u) + sum_i F(w, u_i) E_g(u_i) Phi(w, u_i)] / (kappa c(qw)).

    kappa cancels between numerator and denominator, so it is set to 1.
    """
    n = p.n
    allroots = list(ws) + list(us)
    if len(allroots) < n:
        return 0.0 + 0j
    if len(allroots) == n:
        return zd_partition(allroots, p)
    pk = p.with_left(kappa=1.0, kappa_tilde=0.0)
    w, base = allroots[0], allroots[-n:]
    rest = allroots[1 : len(allroots) - n]
    fx = ScalarFunctions(pk)
    out = lambda_g(w, base, pk) * scalar_product_recursive(rest, base, pk)
    for i, ui in enumerate(base):
        out += fx.F(w, ui) * bethe_residual_g(i, base, pk) * scalar_product_recursive(rest, _replaced(base, i, w), pk)
    return complex(out / fn_c(p.q * w))


# ---------------------------------------------------------------------------
# projection on the l12 basis and the explicit small-N vectors


def basis_labels(n: int) -> list[tuple[int, ...]]:
    return [s for k in range(n + 1) for s in combinations(range(n), k)]


def l12_basis(us: Sequence[complex], p: ModelParams) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """Columns l12(u_S)|Omega> for every subset S of root indices (|Omega^> last)."""
    us = list(us)
    if len(us) != p.n:
        raise ValueError(f"the l12 basis needs N = {p.n} roots")
    l12 = [build_monodromy(u, p.bulk).l12 for u in us]
    labels = basis_labels(p.n)
    cols = []
    for subset in labels:
        vec = vacuum(p.n)
        for i in reversed(subset):
            vec = l12[i] @ vec
        cols.append(vec)
    return labels, np.column_stack(cols)


def project_basis(vec: np.ndarray, us: Sequence[complex], p: ModelParams, max_cond: float = 1e12) -> dict:
    """Coefficients of ``vec`` on the basis l12(u_S)|Omega>, keyed by index tuple."""
    labels, mat = l12_basis(us, p)
    cond = np.linalg.cond(mat)
    if not np.isfinite(cond) or cond > max_cond:
        raise np.linalg.LinAlgError(f"l12 basis is degenerate (condition number {cond:.2e})")
    coef = np.linalg.solve(mat, vec)
    return {label: complex(c) for label, c in zip(labels, coef)}


def _l12_tilde(u: complex, p: ModelParams) -> np.ndarray:
    fx = ScalarFunctions(p)
    w = fx.cross(u)
    lam1, _ = vacuum_lambdas(w, p.bulk)
    return fx.k_minus(w) * lam1 * build_monodromy(u, p.bulk).l12


def explicit_bv_n1(u1: complex, p: ModelParams) -> np.ndarray:
    """B(u_1)|Omega> for N = 1 from l12 actions on the vacuum."""
    if p.n != 1:
        raise ValueError("explicit_bv_n1 is for N = 1")
    fx = ScalarFunctions(p)
    w = fx.cross(u1)
    om = vacuum(1)
    lam_u, _ = vacuum_lambdas(u1, p.bulk)
    lam_w, _ = vacuum_lambdas(w, p.bulk)
    return (
        fx.phi(w) * (_l12_tilde(w, p) - _l12_tilde(u1, p)) @ om
        - p.right.tau * fx.c(u1) * lam_u * lam_w * om
    )


def explicit_bv_n2(u1: complex, u2: complex, p: ModelParams) -> np.ndarray:
    """B(u_1)B(u_2)|Omega> for N = 2 from l12 actions on the vacuum."""
    if p.n != 2:
        raise ValueError("explicit_bv_n2 is for N = 2")
    fx = ScalarFunctions(p)
    q, tau, b = p.q, p.right.tau, fx.b
    om = vacuum(2)
    w1, w2 = fx.cross(u1), fx.cross(u2)

    def lam1(x):
        return vacuum_lambdas(x, p.bulk)[0]

    lt = {x: _l12_tilde(x, p) for x in (u1, u2, w1, w2)}
    ll1 = lam1(u1) * lam1(w1)
    ll2 = lam1(u2) * lam1(w2)
    tau_part = (
        tau**2 * ll1 * ll2 * om
        + tau * ll2 / fn_c(np.sqrt(q) * u1) * (fx.h(u1, u2) * lt[u1] - fx.f(u1, u2) * lt[w1]) @ om
        + tau * ll1 / fn_c(np.sqrt(q) * u2) * (fx.h(u2, u1) * lt[u2] - fx.f(u2, u1) * lt[w2]) @ om
    )
    bulk_part = fx.phi(w1) * fx.phi(w2) * (
        b(q * q * u1 * u2) / b(q * u1 * u2) * lt[u1] @ lt[u2]
        + b(u1 * u2) / b(q * u1 * u2) * lt[w1] @ lt[w2]
        - (b(q * u1 / u2) / b(u1 / u2) * lt[u1] @ lt[w2] + b(q * u2 / u1) / b(u2 / u1) * lt[u2] @ lt[w1])
    ) @ om
    return fn_c(u1) * fn_c(u2) * tau_part + bulk_part
