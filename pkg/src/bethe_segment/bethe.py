"""Eigenvalue functions, Bethe-equation residuals and the reflecting-end partition function."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .boundary import ModelParams
from .functions import ScalarFunctions
from .vertex import PoleError

BRANCH_CASES = ("diag", "upper_upper", "lower_upper")


@dataclass(frozen=True)
class RootSet:
    """Ordered Bethe roots for a given case; ``sector_m`` is their number."""

    roots: tuple[complex, ...]
    case: str = "diag"

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(complex(r) for r in self.roots))

    @property
    def sector_m(self) -> int:
        return len(self.roots)

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def _roots(roots) -> list[complex]:
    return list(roots.roots) if isinstance(roots, RootSet) else [complex(r) for r in roots]


def _others(roots: Sequence[complex], i: int) -> list[complex]:
    return list(roots[:i]) + list(roots[i + 1 :])


def lambda_d(u: complex, roots, p: ModelParams) -> complex:
    """psi(u) f(u, roots) + psi(1/(qu)) h(u, roots)."""
    fx = ScalarFunctions(p)
    us = _roots(roots)
    return complex(fx.psi(u) * fx.prod("f", u, us) + fx.psi(fx.cross(u)) * fx.prod("h", u, us))


def bethe_residual_d(i: int, roots, p: ModelParams) -> complex:
    fx = ScalarFunctions(p)
    us = _roots(roots)
    ui, rest = us[i], _others(us, i)
    w = fx.cross(ui)
    return complex(
        fx.phi(w) * fx.psi(ui) * fx.prod("f", ui, rest) - fx.phi(ui) * fx.psi(w) * fx.prod("h", ui, rest)
    )


def _tk(p: ModelParams) -> complex:
    return p.right.tau * p.left.kappa


def lambda_g(u: complex, roots, p: ModelParams) -> complex:
    """Additional eigenvalue term of the lower/upper case; needs exactly N roots."""
    us = _roots(roots)
    if len(us) != p.n:
        raise ValueError(f"lambda_g needs N = {p.n} roots, got {len(us)}")
    fx = ScalarFunctions(p)
    w = fx.cross(u)
    return complex(
        -_tk(p) * fx.c(u) * fx.c(w) * fx.big_lambda(u) * fx.big_lambda(w) * fx.prod("m", u, us)
    )


def bethe_residual_g(i: int, roots, p: ModelParams) -> complex:
    us = _roots(roots)
    if len(us) != p.n:
        raise ValueError(f"bethe_residual_g needs N = {p.n} roots, got {len(us)}")
    fx = ScalarFunctions(p)
    ui, rest = us[i], _others(us, i)
    w = fx.cross(ui)
    den = fx.b(p.q * ui * ui)
    if abs(den) < 1e-14:
        raise PoleError("E_g: b(q u_i^2) = 0")
    return complex(
        _tk(p) * fx.c(ui) * fx.c(w) / den * fx.big_lambda(ui) * fx.big_lambda(w) * fx.prod("m", ui, rest)
    )


def lambda_total(u: complex, roots, p: ModelParams, case: str = "lower_upper") -> complex:
    if case == "lower_upper":
        return lambda_d(u, roots, p) + lambda_g(u, roots, p)
    return lambda_d(u, roots, p)


def bethe_residual_total(i: int, roots, p: ModelParams, case: str = "lower_upper") -> complex:
    if case == "lower_upper":
        return bethe_residual_d(i, roots, p) + bethe_residual_g(i, roots, p)
    return bethe_residual_d(i, roots, p)


def bethe_residuals(roots, p: ModelParams, case: str) -> np.ndarray:
    us = _roots(roots)
    return np.array([bethe_residual_total(i, us, p, case) for i in range(len(us))], dtype=complex)


def extrapolated_limit(fn, ui: complex, ks=(4, 5, 6, 7)) -> complex:
    """lim_{u -> u_i} fn(u) sampled at u_i (1 + 10^-k), Richardson-extrapolated.

    The samples approach the limit linearly in the offset, so each refinement
    by a factor 10 removes the leading error term.
    """
    table = [fn(ui * (1 + 10.0 ** (-k))) for k in ks]
    while len(table) > 1:
        table = [(10 * table[j + 1] - table[j]) / 9 for j in range(len(table) - 1)]
    return complex(table[0])


def residual_by_limit(i: int, roots, p: ModelParams, branch: str = "d") -> complex:
    """b(u_i/u) Lambda_branch(u) as u -> u_i, evaluated numerically."""
    us = _roots(roots)
    fx = ScalarFunctions(p)
    lam = {"d": lambda_d, "g": lambda_g}[branch]
    return extrapolated_limit(lambda u: fx.b(us[i] / u) * lam(u, us, p), us[i])


def zd_partition(us: Sequence[complex], p: ModelParams) -> complex:
    """Domain-wall partition function with one diagonal reflecting end."""
    us = _roots(us)
    n = p.n
    if len(us) != n:
        raise ValueError(f"zd_partition needs N = {n} roots, got {len(us)}")
    fx = ScalarFunctions(p)
    b, q, v = fx.b, p.q, p.v
    pref = (-1) ** n * np.prod(
        [b(ui / vj) * b(ui * vj) * b(q * ui / vj) * b(q * ui * vj) for ui in us for vj in v]
    )
    den = 1.0 + 0j
    for i in range(n):
        for j in range(i + 1, n):
            den *= b(us[i] / us[j]) * b(q * us[i] * us[j]) * b(v[j] / v[i]) * b(v[i] * v[j])
    if abs(den) < 1e-300:
        raise PoleError("Z_d prefactor: coincident roots or inhomogeneities")
    kernel = np.empty((n, n), dtype=complex)
    for i, ui in enumerate(us):
        w = fx.cross(ui)
        for j, vj in enumerate(v):
            kernel[i, j] = (
                fx.phi(w)
                / (b(q * ui * vj) * b(vj / ui))
                * (fx.k_minus(ui) / b(ui * vj) + fx.k_minus(w) / b(q * ui / vj))
            )
    return complex(pref / den * np.linalg.det(kernel)) if n else 1.0 + 0j


def canonical_root(u: complex, q: complex) -> complex:
    """Representative of the orbit {u, -u, 1/(qu), -1/(qu)}.

    Eigenvalue functions are invariant under both u -> 1/(qu) and u -> -u, and
    B(-u) = B(u). The larger-modulus pair is kept (ties: Im >= 0 after the
    crossing), then the sign with Re > 0 (or Re == 0 and Im >= 0).
    """
    u = complex(u)
    other = 1 / (q * u)
    if abs(abs(u) - abs(other)) > 1e-12 * max(abs(u), 1.0):
        rep = u if abs(u) > abs(other) else other
    else:
        rep = u if u.imag >= 0 else other
    if rep.real < 0 or (rep.real == 0 and rep.imag < 0):
        rep = -rep
    return rep


def canonicalize(roots, q: complex, case: str = "diag") -> RootSet:
    reps = [canonical_root(r, q) for r in _roots(roots)]
    reps.sort(key=lambda z: (round(abs(z), 10), round(float(np.angle(z)), 10)))
    return RootSet(tuple(reps), case)
