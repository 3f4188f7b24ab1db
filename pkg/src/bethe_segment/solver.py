"""Multi-start damped Newton solver for the Bethe equations.

Newton runs in logarithmic coordinates z_i = log u_i on E_i(u) / c(u_i), or on
that divided further by prod_j b(u_i/v_j) b(u_i v_j) for alternate starts, with
a central-difference Jacobian, and is polished on E itself. Sector M reuses the
solutions of sector M - 1 as partial starts.

Converged sets are kept when the roots are admissible (distinct, away from the
poles and from u^4 = 1) and the Bethe vector is not null.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .bethe import RootSet, bethe_residuals, canonicalize
from .boundary import ModelParams, fn_c
from .functions import POLE_EPS
from .states import null_ratio
from .vertex import PoleError, fn_b

log = logging.getLogger(__name__)

CONVERGED = 1e-11
ACCEPT = 1e-9
MAX_ITER = 200
POLISH_ITER = 10
MAX_HALVINGS = 30
POLISH_FROM = 1e-6
JAC_STEP = 1e-6
DISTINCT = 1e-8
NULL_RATIO = 1e-8
ESCAPE = 4.0  # |log u| bound, beyond which a start is abandoned
START_LOG_RADIUS = np.log(5.0)


@dataclass
class SolveResult:
    root_sets: list[RootSet]
    residuals: list[float]
    n_starts: int
    failures: dict[str, int] = field(default_factory=dict)


def _raw_residuals(z: np.ndarray, p: ModelParams, case: str) -> np.ndarray:
    return bethe_residuals(np.exp(z), p, case)


def _reduced_residuals(z: np.ndarray, p: ModelParams, case: str) -> np.ndarray:
    """E_i / c(u_i): E_i vanishes identically at u_i^4 = 1, which this removes."""
    us = np.exp(z)
    cs = np.array([fn_c(u) for u in us])
    if np.any(np.abs(cs) < POLE_EPS):
        raise PoleError("root at u^4 = 1")
    return bethe_residuals(us, p, case) / cs


def _weighted_residuals(z: np.ndarray, p: ModelParams, case: str) -> np.ndarray:
    """E_i / (c(u_i) prod_j b(u_i/v_j) b(u_i v_j)).

    The extra factor vanishes where roots sit on v_j^{+-1}, which is where the
    null-vector solutions live, so those stop attracting Newton.
    """
    us = np.exp(z)
    q = p.q
    den = np.array([fn_c(u) * np.prod([fn_b(u / v, q) * fn_b(u * v, q) for v in p.v]) for u in us])
    if np.any(np.abs(den) < POLE_EPS) or not np.all(np.isfinite(den)):
        raise PoleError("root at u^4 = 1 or on an inhomogeneity")
    return bethe_residuals(us, p, case) / den


RESIDUAL_FORMS = {"plain": _reduced_residuals, "weighted": _weighted_residuals}


def _jacobian(fn, z: np.ndarray, *args) -> np.ndarray:
    base = fn(z, *args)
    jac = np.empty((len(base), len(z)), dtype=complex)
    for j in range(len(z)):
        dz = np.zeros(len(z), dtype=complex)
        dz[j] = JAC_STEP
        jac[:, j] = (fn(z + dz, *args) - fn(z - dz, *args)) / (2 * JAC_STEP)
    return jac


def _damped_newton(z, p: ModelParams, case: str, fn, tol: float, max_iter: int) -> np.ndarray:
    """Newton on fn with step halving on sup-norm increase; returns the final z."""
    e = fn(z, p, case)
    norm = float(np.max(np.abs(e)))
    for _ in range(max_iter):
        if norm < tol:
            break
        step = np.linalg.solve(_jacobian(fn, z, p, case), -e)
        if not np.all(np.isfinite(step)):
            raise np.linalg.LinAlgError("non-finite Newton step")
        lam = 1.0
        for _ in range(MAX_HALVINGS):
            z_new = z + lam * step
            try:
                e_new = fn(z_new, p, case)
                norm_new = float(np.max(np.abs(e_new)))
            except (PoleError, ZeroDivisionError, FloatingPointError, OverflowError):
                norm_new = np.inf
            if np.isfinite(norm_new) and norm_new < norm:
                break
            lam /= 2
        else:
            break
        z, e, norm = z_new, e_new, norm_new
        if np.any(np.abs(z.real) > ESCAPE):
            raise np.linalg.LinAlgError("roots escaped to 0 or infinity")
    return z


def newton(u0, p: ModelParams, case: str, form: str = "plain") -> tuple[np.ndarray, float]:
    """Damped Newton on a reduced residual, polished on E; returns roots and sup |E|."""
    fn = RESIDUAL_FORMS[form]
    z = np.log(np.asarray(u0, dtype=complex))
    z = _damped_newton(z, p, case, fn, CONVERGED, MAX_ITER)
    if float(np.max(np.abs(fn(z, p, case)))) > POLISH_FROM:
        return np.exp(z), np.inf
    z = _damped_newton(z, p, case, _raw_residuals, CONVERGED, POLISH_ITER)
    return np.exp(z), float(np.max(np.abs(_raw_residuals(z, p, case))))


def _admissible(roots: np.ndarray, p: ModelParams) -> bool:
    q = p.q
    for i, ui in enumerate(roots):
        if not (0.05 < abs(ui) < 20):
            return False
        if abs(fn_b(q * ui * ui, q)) < DISTINCT or abs(fn_b(ui * ui, q)) < DISTINCT:
            return False
        # u^4 = 1 solves the equations trivially and annihilates the state
        if abs(fn_c(ui)) < DISTINCT or abs(fn_c(1 / (q * ui))) < DISTINCT:
            return False
        for uj in roots[i + 1 :]:
            if abs(fn_b(ui / uj, q)) < DISTINCT or abs(fn_b(q * ui * uj, q)) < DISTINCT:
                return False
    return True


def _annulus(m: int, rng: np.random.Generator) -> np.ndarray:
    """Log-uniform modulus in [1/5, 5], uniform phase."""
    mod = np.exp(rng.uniform(-START_LOG_RADIUS, START_LOG_RADIUS, m))
    return mod * np.exp(1j * rng.uniform(0, 2 * np.pi, m))


def starting_points(
    m: int, n_starts: int, rng: np.random.Generator, p: ModelParams, lower: list[RootSet] | None = None
) -> list[np.ndarray]:
    """Starts cycling through three kinds.

    Annulus draws (log-uniform modulus in [1/5, 5], uniform phase); jittered
    strings v_i q^{+-1/2}; and, when solutions of the sector below are given,
    one of those extended by a random root with each old root replaced by a
    random image under u -> 1/(qu).
    """
    q = p.q
    anchors = [vi * np.sqrt(q) ** s for vi in p.v for s in (1, -1)]
    out = []
    for k in range(n_starts):
        kind = k % 3
        if kind == 1 and anchors:
            pick = rng.choice(len(anchors), size=m, replace=m > len(anchors))
            jitter = 1 + 0.15 * (rng.normal(size=m) + 1j * rng.normal(size=m))
            out.append(np.array([anchors[i] for i in pick]) * jitter)
        elif kind == 2 and lower:
            base = lower[(k // 3) % len(lower)].roots
            flips = rng.random(len(base)) < 0.5
            old = [1 / (q * u) if f else u for u, f in zip(base, flips)]
            out.append(np.concatenate([np.array(old, dtype=complex), _annulus(1, rng)]))
        else:
            out.append(_annulus(m, rng))
    return out


def _key(rs: RootSet) -> tuple:
    return tuple((round(r.real, 7), round(r.imag, 7)) for r in rs.roots)


def _check_args(case: str, sector_m: int, p: ModelParams) -> None:
    if case not in ("diag", "upper_upper", "lower_upper"):
        raise ValueError(f"unknown case {case!r}")
    if case == "lower_upper" and sector_m != p.n:
        raise ValueError(f"lower/upper case needs sector_m = N = {p.n}")
    if not 0 <= sector_m <= p.n:
        raise ValueError(f"sector_m must be in 0..{p.n}")


def _solve_sector(
    case: str, sector_m: int, p: ModelParams, n_starts: int, seed: int, lower: list[RootSet] | None
) -> SolveResult:
    if sector_m == 0:
        return SolveResult([RootSet((), case)], [0.0], 1)
    rng = np.random.default_rng(seed)
    found: dict[tuple, tuple[RootSet, float]] = {}
    rejected: set[tuple] = set()
    failures = {"singular": 0, "no_convergence": 0, "inadmissible": 0, "null_vector": 0, "repeat": 0}
    for k, u0 in enumerate(starting_points(sector_m, n_starts, rng, p, lower)):
        # both residual forms see every start kind
        form = "weighted" if (k // 3) % 2 else "plain"
        try:
            # runaway starts overflow on their way out; they are caught below
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                roots, norm = newton(u0, p, case, form)
        except (np.linalg.LinAlgError, PoleError, ZeroDivisionError, OverflowError):
            failures["singular"] += 1
            continue
        if not norm < ACCEPT:
            failures["no_convergence"] += 1
            continue
        rs = canonicalize(roots, p.q, case)
        key = _key(rs)
        if key in found or key in rejected:
            failures["repeat"] += 1
            if key in found and norm < found[key][1]:
                found[key] = (rs, norm)
            continue
        if not _admissible(roots, p):
            rejected.add(key)
            failures["inadmissible"] += 1
        elif null_ratio(rs.roots, p, case) < NULL_RATIO:
            rejected.add(key)
            failures["null_vector"] += 1
        else:
            found[key] = (rs, norm)
    ordered = [found[k] for k in sorted(found)]
    log.debug("case=%s M=%d: %d root sets, failures %s", case, sector_m, len(ordered), failures)
    return SolveResult([rs for rs, _ in ordered], [nr for _, nr in ordered], n_starts, failures)


def solve_sectors(
    case: str, p: ModelParams, top_m: int | None = None, n_starts: int = 64, seed: int = 0
) -> dict[int, SolveResult]:
    """Sectors 0..top_m (default N) solved bottom-up, each seeding the next.

    The lower/upper case has the single sector M = N and no seeding.
    """
    top_m = p.n if top_m is None else top_m
    _check_args(case, top_m, p)
    if case == "lower_upper":
        return {top_m: _solve_sector(case, top_m, p, n_starts, seed, None)}
    out: dict[int, SolveResult] = {}
    lower = None
    for m in range(top_m + 1):
        out[m] = _solve_sector(case, m, p, n_starts, seed, lower if m >= 2 else None)
        lower = out[m].root_sets
    return out


def solve_bethe(
    case: str, sector_m: int, p: ModelParams, n_starts: int = 64, seed: int = 0
) -> SolveResult:
    """Distinct canonical root sets with sup-norm Bethe residual below 1e-9."""
    return solve_sectors(case, p, sector_m, n_starts, seed)[sector_m]
