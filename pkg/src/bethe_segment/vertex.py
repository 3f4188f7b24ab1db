"""Bulk Yang-Baxter layer: R-matrix, monodromy, co-matrix, quantum determinant.

Spectral parameters are multiplicative. All operator-valued objects are dense
numpy arrays on the quantum space ``(C^2)^{\\otimes N}``; a monodromy matrix is
returned as its four entries ``l11, l12, l21, l22``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .tensor import (
    MAX_OPERATOR_SITES,
    SIGMA_MINUS,
    SIGMA_PLUS,
    check_sites,
    embed_local,
    relative_residual,
)

# Matrix units E_ij acting on an auxiliary C^2
_UNITS = {
    (i, j): np.array([[1.0 if (r, c) == (i, j) else 0.0 for c in range(2)] for r in range(2)], dtype=complex)
    for i in range(2)
    for j in range(2)
}


class PoleError(ZeroDivisionError):
    """A rational function was evaluated on (or too close to) one of its poles."""


def fn_b(u: complex, q: complex) -> complex:
    """b(u) = (u - 1/u) / (q - 1/q)."""
    den = q - 1 / q
    if den == 0:
        raise PoleError("b(u) undefined: q - 1/q = 0")
    return (u - 1 / u) / den


def anisotropy(q: complex) -> complex:
    return (q + 1 / q) / 2


@dataclass(frozen=True)
class BulkParams:
    """Anisotropy ``q`` and inhomogeneities ``v`` of an ``n``-site chain."""

    q: complex
    v: tuple[complex, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "q", complex(self.q))
        object.__setattr__(self, "v", tuple(complex(x) for x in self.v))

    @property
    def n(self) -> int:
        return len(self.v)

    @property
    def delta(self) -> complex:
        return anisotropy(self.q)

    def admissibility_problems(self) -> list[str]:
        """Human-readable violations of the genericity assumptions (empty if fine)."""
        problems = []
        q, n = self.q, self.n
        for k in range(1, 2 * n + 5):
            if abs(q**k - 1) <= 1e-6:
                problems.append(f"q is (close to) a root of unity of order {k}")
                break
        for i, vi in enumerate(self.v):
            if vi == 0:
                problems.append(f"v[{i}] = 0")
        for i in range(n):
            for j in range(n):
                if i == j or self.v[j] == 0:
                    continue
                ratio = self.v[i] / self.v[j]
                for m in range(-2, 3):
                    if abs(ratio - q**m) < 1e-8:
                        problems.append(f"v[{i}]/v[{j}] = q^{m}")
        return problems

    def check(self) -> None:
        problems = self.admissibility_problems()
        if problems:
            raise ValueError("inadmissible bulk parameters: " + "; ".join(problems))


class Monodromy(NamedTuple):
    """Entries of a 2x2 operator-valued matrix in the auxiliary space."""

    l11: np.ndarray
    l12: np.ndarray
    l21: np.ndarray
    l22: np.ndarray

    def block(self, i: int, j: int) -> np.ndarray:
        return self[2 * (i - 1) + (j - 1)]

    def full(self) -> np.ndarray:
        """Operator on aux (x) quantum, aux as leftmost factor."""
        return np.block([[self.l11, self.l12], [self.l21, self.l22]])

    @classmethod
    def from_full(cls, mat: np.ndarray) -> "Monodromy":
        d = mat.shape[0] // 2
        return cls(mat[:d, :d], mat[:d, d:], mat[d:, :d], mat[d:, d:])


def build_r(u: complex, q: complex) -> np.ndarray:
    """The symmetric trigonometric R-matrix on C^2 (x) C^2."""
    bq = fn_b(q * u, q)
    b1 = fn_b(u, q)
    return np.array(
        [[bq, 0, 0, 0], [0, b1, 1, 0], [0, 1, b1, 0], [0, 0, 0, bq]],
        dtype=complex,
    )


def _r_local_blocks(u: complex, q: complex) -> dict[tuple[int, int], np.ndarray]:
    """R(u) written as a 2x2 matrix in the first space with 2x2 entries."""
    return {
        (0, 0): np.diag([fn_b(q * u, q), fn_b(u, q)]).astype(complex),
        (0, 1): SIGMA_MINUS,
        (1, 0): SIGMA_PLUS,
        (1, 1): np.diag([fn_b(u, q), fn_b(q * u, q)]).astype(complex),
    }


def r_aux_site(u: complex, q: complex, site: int, n: int) -> np.ndarray:
    """R_{a,site}(u) as a (2*2^n)-dimensional matrix, auxiliary space first."""
    blocks = _r_local_blocks(u, q)
    return sum(np.kron(_UNITS[key], embed_local(op, site, n)) for key, op in blocks.items())


def ybe_residual(ua: complex, ub: complex, uc: complex, q: complex) -> float:
    """Relative residual of the Yang-Baxter equation on C^2 (x) C^2 (x) C^2."""
    i2 = np.eye(2, dtype=complex)
    swap_23 = np.kron(i2, build_r(1.0, q))  # R(1) is the permutation
    r_ab = np.kron(build_r(ua / ub, q), i2)
    r_bc = np.kron(i2, build_r(ub / uc, q))
    r_ac = swap_23 @ np.kron(build_r(ua / uc, q), i2) @ swap_23
    lhs = r_ab @ r_ac @ r_bc
    rhs = r_bc @ r_ac @ r_ab
    return relative_residual(lhs, rhs)


def build_monodromy(u: complex, p: BulkParams) -> Monodromy:
    """L_a(u) = R_{a1}(u/v_1) ... R_{aN}(u/v_N)."""
    n = p.n
    check_sites(n, MAX_OPERATOR_SITES)
    full = np.eye(2 ** (n + 1), dtype=complex)
    for site, vk in enumerate(p.v, start=1):
        full = full @ r_aux_site(u / vk, p.q, site, n)
    return Monodromy.from_full(full)


def build_comonodromy(u: complex, p: BulkParams) -> Monodromy:
    """The co-matrix evaluated at q^-2 u^-1, from (-1)^N R_{aN}(u v_N) ... R_{a1}(u v_1)."""
    n = p.n
    check_sites(n, MAX_OPERATOR_SITES)
    full = np.eye(2 ** (n + 1), dtype=complex)
    for site in range(n, 0, -1):
        full = full @ r_aux_site(u * p.v[site - 1], p.q, site, n)
    return Monodromy.from_full((-1) ** n * full)


def comonodromy_by_transposition(x: complex, p: BulkParams) -> Monodromy:
    """Co-matrix at argument ``x`` from the entries of L(qx) (cross-check only)."""
    l = build_monodromy(p.q * x, p)
    return Monodromy(l.l22, -l.l12, -l.l21, l.l11)


def mono_product(a: Monodromy, b: Monodromy) -> Monodromy:
    return Monodromy.from_full(a.full() @ b.full())


def qdet_operator(u: complex, p: BulkParams) -> np.ndarray:
    """l11(qu) l22(u) - l12(qu) l21(u) as a matrix."""
    lu = build_monodromy(u, p)
    lqu = build_monodromy(p.q * u, p)
    return lqu.l11 @ lu.l22 - lqu.l12 @ lu.l21


def qdet_product(u: complex, p: BulkParams) -> complex:
    """Scalar value of the quantum determinant in the fundamental representation."""
    q = p.q
    return complex(np.prod([fn_b(q * q * u / vi, q) * fn_b(u / vi, q) for vi in p.v]))


def quantum_determinant(u: complex, p: BulkParams, tol: float = 1e-10) -> complex:
    """The scalar by which the quantum determinant acts.

    Computed from the operator form and checked to be proportional to the
    identity; raises ``ValueError`` otherwise.
    """
    op = qdet_operator(u, p)
    d = op.shape[0]
    scalar = complex(np.trace(op) / d)
    off = relative_residual(op, scalar * np.eye(d)) if scalar != 0 else float(np.linalg.norm(op))
    if off > tol:
        raise ValueError(f"quantum determinant not proportional to identity (residual {off:.2e})")
    return scalar


def vacuum_lambdas(u: complex, p: BulkParams) -> tuple[complex, complex]:
    """Eigenvalues of l11 and l22 on the all-up state."""
    q = p.q
    lam1 = np.prod([fn_b(q * u / vi, q) for vi in p.v]) if p.v else 1.0
    lam2 = np.prod([fn_b(u / vi, q) for vi in p.v]) if p.v else 1.0
    return complex(lam1), complex(lam2)


def izergin_z(us: Sequence[complex], p: BulkParams) -> complex:
    """Domain-wall partition function Z(u|v) via the Izergin determinant."""
    q, v = p.q, p.v
    n = p.n
    if len(us) != n:
        raise ValueError(f"izergin_z needs {n} spectral parameters, got {len(us)}")
    for i in range(n):
        for j in range(i + 1, n):
            if abs(fn_b(us[i] / us[j], q)) < 1e-12:
                raise PoleError(f"coincident spectral parameters u[{i}], u[{j}]")
    a = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            den = fn_b(us[i] / v[j], q) * fn_b(q * us[i] / v[j], q)
            if den == 0:
                raise PoleError(f"a(u[{i}], v[{j}]) has a pole")
            a[i, j] = 1 / den
    pref = np.prod(a)
    for i in range(n):
        for j in range(i + 1, n):
            pref *= fn_b(us[i] / us[j], q) * fn_b(v[j] / v[i], q)
    return complex(np.linalg.det(a) / pref) if n else 1.0 + 0j


def l12_string(us: Sequence[complex], p: BulkParams, vec: np.ndarray) -> np.ndarray:
    """l12(u_1) ... l12(u_k) applied to ``vec``."""
    out = vec
    for u in reversed(list(us)):
        out = build_monodromy(u, p).l12 @ out
    return out


def rll_residual(u: complex, v: complex, p: BulkParams) -> float:
    """Residual of R_ab(u/v) L_a(u) L_b(v) = L_b(v) L_a(u) R_ab(u/v)."""
    la = build_monodromy(u, p)
    lb = build_monodromy(v, p)
    i2 = np.eye(2, dtype=complex)
    d = la.l11.shape[0]
    op_a = sum(np.kron(np.kron(_UNITS[(i, j)], i2), la[2 * i + j]) for i in range(2) for j in range(2))
    op_b = sum(np.kron(np.kron(i2, _UNITS[(i, j)]), lb[2 * i + j]) for i in range(2) for j in range(2))
    r_ab = np.kron(build_r(u / v, p.q), np.eye(d))
    return relative_residual(r_ab @ op_a @ op_b, op_b @ op_a @ r_ab)


def l_relation_residuals(u: complex, v: complex, p: BulkParams) -> dict[str, float]:
    """Residuals of the four exchange relations between l_ij entries."""
    q = p.q
    lu = build_monodromy(u, p)
    lv = build_monodromy(v, p)
    b = lambda x: fn_b(x, q)  # noqa: E731
    out = {}
    out["l12_l12"] = relative_residual(lu.l12 @ lv.l12, lv.l12 @ lu.l12)
    out["l11_l12"] = relative_residual(
        lu.l11 @ lv.l12,
        b(q * v / u) / b(v / u) * lv.l12 @ lu.l11 + 1 / b(u / v) * lu.l12 @ lv.l11,
    )
    out["l22_l12"] = relative_residual(
        lu.l22 @ lv.l12,
        b(q * u / v) / b(u / v) * lv.l12 @ lu.l22 + 1 / b(v / u) * lu.l12 @ lv.l22,
    )
    out["l21_l12"] = relative_residual(
        lu.l21 @ lv.l12,
        lv.l12 @ lu.l21 + 1 / b(u / v) * (lv.l11 @ lu.l22 - lu.l11 @ lv.l22),
    )
    return out


def l12_interpolation_residual(u: complex, u1: complex, u2: complex, p: BulkParams) -> float:
    """Two-chain identity l12(u) = b(u/u2)/b(u1/u2) l12(u1) + b(u/u1)/b(u2/u1) l12(u2).

    For n = 2 every entry of l12(u) lies in span{u, 1/u}, so two nodes fix it.
    """
    if p.n != 2:
        raise ValueError(f"the interpolation identity needs n = 2, got {p.n}")
    q = p.q
    rhs = (
        fn_b(u / u2, q) / fn_b(u1 / u2, q) * build_monodromy(u1, p).l12
        + fn_b(u / u1, q) / fn_b(u2 / u1, q) * build_monodromy(u2, p).l12
    )
    return relative_residual(build_monodromy(u, p).l12, rhs)
