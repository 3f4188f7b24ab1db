"""Configuration, check reports, suite runner and report emitters."""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from typing import Any, Callable, Iterable

import numpy as np

from .boundary import (
    LeftBoundary,
    ModelParams,
    RightBoundary,
    build_transfer,
    derivative,
    hamiltonian_for,
    hamiltonian_shift,
)
from .bethe import bethe_residuals, lambda_total
from .solver import solve_sectors
from .states import build_bethe_vector, null_ratio
from .tensor import MAX_OPERATOR_SITES, spectrum
from .vertex import BulkParams, fn_b

CASE_NAMES = ("diag", "upper_upper", "lower_upper")
BOUNDARY_FIELDS = ("nu_plus", "nu_minus", "tau", "tau_tilde", "eps_plus", "eps_minus", "kappa", "kappa_tilde")
DEFAULT_CONFIG = "default_config.json"
PROBES = (0.9 + 0.3j, 1.2 - 0.4j, 0.7 + 0.8j)
MATCH_TOL = 1e-8


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending path."""


def normalize_case(case: str | None) -> str | None:
    if case is None:
        return None
    name = case.replace("-", "_")
    if name not in CASE_NAMES:
        raise ConfigError(f"case: unknown case {case!r} (expected one of {', '.join(CASE_NAMES)})")
    return name


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class CheckReport:
    check_id: str
    params_digest: str
    samples: int
    max_residual: float
    tolerance: float
    passed: bool
    elapsed_ms: int

    def __post_init__(self):
        if self.passed != (self.max_residual < self.tolerance):
            raise ValueError(f"{self.check_id}: passed flag disagrees with residual and tolerance")

    def to_dict(self, timings: bool = True) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        if not timings:
            out["elapsed_ms"] = 0
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        return cls(**{f.name: d[f.name] for f in fields(cls)})


def make_report(check_id: str, digest: str, residuals: Iterable[float], tolerance: float, elapsed_ms: int) -> CheckReport:
    res = [float(r) for r in residuals]
    worst = max(res) if res else 0.0
    if any(math.isnan(r) for r in res):
        worst = math.inf
    return CheckReport(check_id, digest, len(res), worst, float(tolerance), bool(worst < tolerance), int(elapsed_ms))


def emit_report(reports: Iterable[CheckReport], fmt: str = "json", timings: bool = False) -> str:
    """Serialize reports; ``json`` output is byte-stable unless ``timings`` is on.

    Non-finite residuals are written as the JSON extensions ``Infinity``/``NaN``.
    """
    reports = list(reports)
    if fmt == "json":
        return json.dumps([r.to_dict(timings) for r in reports], indent=2) + "\n"
    if fmt == "table":
        head = f"{'check_id':<48} {'samples':>7} {'max_residual':>12} {'tolerance':>10} {'ms':>7}  result"
        lines = [head, "-" * len(head)]
        for r in reports:
            ms = r.elapsed_ms if timings else 0
            lines.append(
                f"{r.check_id:<48} {r.samples:>7d} {r.max_residual:>12.3e} {r.tolerance:>10.1e} {ms:>7d}  "
                + ("pass" if r.passed else "FAIL")
            )
        failed = sum(not r.passed for r in reports)
        lines.append(f"{len(reports)} checks, {failed} failed")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")


# ---------------------------------------------------------------------------
# configuration


def _complex_from(value: Any, path: str) -> complex:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        raise ConfigError(f"{path}: expected a [re, im] pair of numbers, got {value!r}")
    z = complex(float(value[0]), float(value[1]))
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ConfigError(f"{path}: non-finite complex number")
    return z


def _complex_to(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


@dataclass(frozen=True)
class RunConfig:
    """Run settings. ``n`` and ``case`` of None mean "each suite's own range"."""

    seed: int = 0
    n: int | None = None
    case: str | None = None
    q: complex = 1.27144 + 0.271j
    v: tuple[complex, ...] = (1.0 + 0j,)
    nu_plus: complex = 1.0 + 0j
    nu_minus: complex = 1.0 + 0j
    tau: complex = 0j
    tau_tilde: complex = 0j
    eps_plus: complex = 1.0 + 0j
    eps_minus: complex = 1.0 + 0j
    kappa: complex = 0j
    kappa_tilde: complex = 0j
    suites: tuple[str, ...] = ("all",)
    tolerances: dict[str, float] = field(default_factory=dict)
    starts: int = 64
    note: str = ""

    def to_dict(self) -> dict:
        out: dict[str, Any] = {}
        for f in fields(self):
            val = getattr(self, f.name)
            if f.name == "v":
                out[f.name] = [_complex_to(z) for z in val]
            elif f.name == "q" or f.name in BOUNDARY_FIELDS:
                out[f.name] = _complex_to(val)
            elif f.name == "suites":
                out[f.name] = list(val)
            elif f.name == "tolerances":
                out[f.name] = dict(sorted(val.items()))
            else:
                out[f.name] = val
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: Any, path: str = "config") -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"{path}.{unknown[0]}: unknown key")
        kw: dict[str, Any] = {}
        for key, val in d.items():
            where = f"{path}.{key}"
            if key in ("seed", "starts"):
                if not isinstance(val, int) or isinstance(val, bool) or val < 0:
                    raise ConfigError(f"{where}: expected a non-negative integer")
                kw[key] = val
            elif key == "n":
                if val is not None and (not isinstance(val, int) or isinstance(val, bool) or not 1 <= val <= MAX_OPERATOR_SITES):
                    raise ConfigError(f"{where}: expected null or an integer in 1..{MAX_OPERATOR_SITES}")
                kw[key] = val
            elif key == "case":
                if val is not None and not isinstance(val, str):
                    raise ConfigError(f"{where}: expected null or a string")
                try:
                    kw[key] = normalize_case(val)
                except ConfigError as exc:
                    raise ConfigError(f"{where}: {exc}") from None
            elif key == "q" or key in BOUNDARY_FIELDS:
                kw[key] = _complex_from(val, where)
            elif key == "v":
                if not isinstance(val, list) or not val:
                    raise ConfigError(f"{where}: expected a non-empty list of [re, im] pairs")
                kw[key] = tuple(_complex_from(x, f"{where}[{i}]") for i, x in enumerate(val))
            elif key == "suites":
                if not isinstance(val, list) or not all(isinstance(s, str) for s in val):
                    raise ConfigError(f"{where}: expected a list of suite ids")
                kw[key] = tuple(val)
            elif key == "tolerances":
                if not isinstance(val, dict):
                    raise ConfigError(f"{where}: expected an object of id -> tolerance")
                tol = {}
                for k, t in val.items():
                    if not isinstance(t, (int, float)) or isinstance(t, bool) or not t > 0:
                        raise ConfigError(f"{where}.{k}: expected a positive number")
                    tol[k] = float(t)
                kw[key] = tol
            elif key == "note":
                if not isinstance(val, str):
                    raise ConfigError(f"{where}: expected a string")
                kw[key] = val
        cfg = cls(**kw)
        cfg.validate(path)
        return cfg

    @classmethod
    def from_json(cls, text: str, path: str = "config") -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(data, path)

    @classmethod
    def load(cls, filename: str) -> "RunConfig":
        with open(filename, encoding="utf-8") as fh:
            return cls.from_json(fh.read(), filename)

    @classmethod
    def default(cls) -> "RunConfig":
        text = resources.files("bethe_segment").joinpath(DEFAULT_CONFIG).read_text(encoding="utf-8")
        return cls.from_json(text, DEFAULT_CONFIG)

    def validate(self, path: str = "config") -> None:
        problems = BulkParams(self.q, self.v).admissibility_problems()
        if problems:
            raise ConfigError(f"{path}: {problems[0]}")
        if self.n is not None and self.n > len(self.v):
            raise ConfigError(f"{path}.n: n = {self.n} exceeds the {len(self.v)} inhomogeneities given")

    def with_overrides(self, **changes) -> "RunConfig":
        changes = {k: v for k, v in changes.items() if v is not None}
        if "case" in changes:
            changes["case"] = normalize_case(changes["case"])
        cfg = replace(self, **changes)
        cfg.validate()
        return cfg

    def model_params(self, n: int, case: str | None) -> ModelParams:
        """Configured parameters on n sites, with the fields the case forbids set to zero.

        With case None only tau_tilde is zeroed (it is zero in every case).
        """
        if n > len(self.v):
            raise ConfigError(f"config.v: {len(self.v)} inhomogeneities, {n} needed")
        return case_params(
            ModelParams(
                BulkParams(self.q, self.v[:n]),
                LeftBoundary(self.eps_plus, self.eps_minus, self.kappa, self.kappa_tilde),
                RightBoundary(self.nu_plus, self.nu_minus, self.tau, self.tau_tilde),
            ),
            case,
        )

    def tolerance_for(self, check_id: str, suite_id: str, default: float) -> float:
        for key in (check_id, suite_id):
            if key in self.tolerances:
                return self.tolerances[key]
        return default


def case_params(p: ModelParams, case: str | None) -> ModelParams:
    """Zero the boundary fields that the transfer case excludes (tau_tilde always)."""
    p = p.with_right(tau_tilde=0)
    if case is None:
        return p
    if case == "diag":
        return p.with_right(tau=0).with_left(kappa=0, kappa_tilde=0)
    if case == "upper_upper":
        return p.with_left(kappa=0)
    if case == "lower_upper":
        return p.with_left(kappa_tilde=0)
    raise ConfigError(f"case: unknown case {case!r}")


def params_digest(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def suite_rng(seed: int, suite_id: str) -> np.random.Generator:
    """Independent stream per suite, derived from the global seed and the suite id."""
    tag = int.from_bytes(hashlib.sha256(suite_id.encode()).digest()[:8], "big")
    return np.random.default_rng([seed, tag])


# ---------------------------------------------------------------------------
# random sampling

POLE_GUARD = 1e-6


class Sampler:
    """Complex draws with modulus uniform in [0.5, 2] and uniform phase."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def scalar(self) -> complex:
        mod = self.rng.uniform(0.5, 2.0)
        return complex(mod * np.exp(1j * self.rng.uniform(0, 2 * np.pi)))

    def matrix(self, shape) -> np.ndarray:
        return self.rng.normal(size=shape) + 1j * self.rng.normal(size=shape)

    def bulk(self, n: int, q: complex) -> BulkParams:
        for _ in range(1000):
            p = BulkParams(q, tuple(self.scalar() for _ in range(n)))
            if not p.admissibility_problems():
                return p
        raise RuntimeError("could not draw admissible inhomogeneities")

    def model(self, n: int, q: complex, case: str) -> ModelParams:
        bulk = self.bulk(n, q)
        left = LeftBoundary(*(self.scalar() for _ in range(4)))
        right = RightBoundary(*(self.scalar() for _ in range(4)))
        return case_params(ModelParams(bulk, left, right), case)

    def points(self, k: int, p: ModelParams | BulkParams, avoid: Iterable[complex] = ()) -> list[complex]:
        """k spectral points away from the poles of every rational function in use."""
        q = p.q
        v = p.v
        out: list[complex] = []
        others = list(avoid)
        for _ in range(1000 * max(k, 1)):
            if len(out) == k:
                break
            u = self.scalar()
            vals = [fn_b(q * u * u, q), fn_b(q * q * u * u, q), fn_b(u * u, q), u**2 - u**-2]
            for vi in v:
                vals += [fn_b(u / vi, q), fn_b(u * vi, q), fn_b(q * u / vi, q), fn_b(q * u * vi, q)]
            for w in out + others:
                vals += [fn_b(u / w, q), fn_b(q * u * w, q), fn_b(u * w, q), fn_b(q * u / w, q), fn_b(q * w / u, q)]
            if min(abs(x) for x in vals) >= POLE_GUARD:
                out.append(u)
        if len(out) < k:
            raise RuntimeError("could not draw spectral points away from poles")
        return out


# ---------------------------------------------------------------------------
# suites


@dataclass(frozen=True)
class Suite:
    suite_id: str
    module: str
    description: str
    run: Callable[["SuiteContext"], None]


class SuiteContext:
    """Handed to a suite body: sampler, parameters and a collector for checks."""

    def __init__(self, suite_id: str, config: RunConfig):
        self.suite_id = suite_id
        self.config = config
        self.sampler = Sampler(suite_rng(config.seed, suite_id))
        self.q = config.q
        self._checks: dict[str, list[float]] = {}
        self._tols: dict[str, float] = {}
        self._times: dict[str, float] = {}

    def sizes(self, default: Iterable[int]) -> list[int]:
        """The suite's own sizes, or just the configured n when it is one of them."""
        allowed = list(default)
        if self.config.n is None:
            return allowed
        return [self.config.n] if self.config.n in allowed else []

    def cases(self, default: Iterable[str] = CASE_NAMES) -> list[str]:
        allowed = list(default)
        if self.config.case is None:
            return allowed
        return [self.config.case] if self.config.case in allowed else []

    def record(self, name: str, residual: float, tol: float, started: float) -> None:
        check_id = f"{self.suite_id}:{name}"
        self._checks.setdefault(check_id, []).append(float(residual))
        self._tols[check_id] = self.config.tolerance_for(check_id, self.suite_id, tol)
        self._times[check_id] = self._times.get(check_id, 0.0) + (time.perf_counter() - started)

    def reports(self) -> list[CheckReport]:
        digest = params_digest({"suite": self.suite_id, "config": self.config.to_dict()})
        return [
            make_report(cid, digest, res, self._tols[cid], round(1000 * self._times[cid]))
            for cid, res in self._checks.items()
        ]


SUITES: dict[str, Suite] = {}


def register(suite_id: str, module: str, description: str):
    def deco(fn):
        if suite_id in SUITES:
            raise ValueError(f"duplicate suite id {suite_id}")
        SUITES[suite_id] = Suite(suite_id, module, description, fn)
        return fn

    return deco


def suite_ids() -> list[str]:
    from . import suites  # noqa: F401  (registers the suites)

    return sorted(SUITES)


def run_suite(suite_id: str, config: RunConfig) -> list[CheckReport]:
    suite_ids()
    if suite_id not in SUITES:
        raise KeyError(f"unknown suite {suite_id!r}")
    ctx = SuiteContext(suite_id, config)
    SUITES[suite_id].run(ctx)
    return ctx.reports()


def run_suites(ids: Iterable[str], config: RunConfig) -> list[CheckReport]:
    """Run several suites; reports come back grouped in suite_id order."""
    ids = list(ids)
    if not ids or "all" in ids:
        ids = suite_ids()
    out: list[CheckReport] = []
    for sid in sorted(set(ids)):
        out.extend(run_suite(sid, config))
    return out


# ---------------------------------------------------------------------------
# solver report


def _match(lam: complex, eigs: np.ndarray) -> tuple[int, float]:
    scale = max(1.0, float(np.max(np.abs(eigs))))
    dist = np.abs(eigs - lam) / scale
    k = int(np.argmin(dist))
    return k, float(dist[k])


def _solve(case: str, p: ModelParams, sector_m: int | None, starts: int, seed: int):
    """Solver results for one sector, or for every sector when sector_m is None."""
    top = p.n if case == "lower_upper" or sector_m is None else sector_m
    results = solve_sectors(case, p, top, starts, seed)
    if sector_m is not None and case != "lower_upper":
        results = {sector_m: results[sector_m]}
    return results


def run_solve(
    config: RunConfig,
    n: int,
    case: str,
    sector_m: int | None = None,
    starts: int | None = None,
    seed: int | None = None,
    hamiltonian_check: bool = True,
) -> dict:
    """Solve, match every root set against exact transfer eigenvalues, report coverage."""
    case = normalize_case(case)
    starts = config.starts if starts is None else starts
    seed = config.seed if seed is None else seed
    p = config.model_params(n, case)
    transfers = [build_transfer(x, p, case) for x in PROBES]
    eigs = [spectrum(t) for t in transfers]
    matched = [set() for _ in PROBES]
    sectors = []
    for m, res in _solve(case, p, sector_m, starts, seed).items():
        sets = []
        for rs, nres in zip(res.root_sets, res.residuals):
            entry = _root_set_entry(rs.roots, p, case, transfers, eigs)
            for j, mt in enumerate(entry["matches"]):
                if mt["distance"] < MATCH_TOL:
                    matched[j].add(mt["index"])
            sets.append(entry)
        sectors.append({"m": m, "root_sets": sets, "failures": res.failures, "starts": res.n_starts})
    unmatched = [_complex_to(eigs[0][k]) for k in range(len(eigs[0])) if k not in matched[0]]
    report = {
        "case": case,
        "n": n,
        "seed": seed,
        "starts": starts,
        "probes": [_complex_to(x) for x in PROBES],
        "sectors": sectors,
        "matched_eigenvalues": len(matched[0]),
        "total_eigenvalues": len(eigs[0]),
        "unmatched_eigenvalues": unmatched,
    }
    if hamiltonian_check:
        report["hamiltonian"] = hamiltonian_cross_check(config, n, case, sector_m, starts, seed)
    return report


def _root_set_entry(roots, p: ModelParams, case: str, transfers, eigs) -> dict:
    resid = bethe_residuals(roots, p, case)
    matches = []
    for x, ev in zip(PROBES, eigs):
        lam = lambda_total(x, roots, p, case)
        k, d = _match(lam, ev)
        matches.append({"probe": _complex_to(x), "lambda": _complex_to(lam), "index": k, "distance": d})
    phi = build_bethe_vector(roots, p, case).state
    lam0 = lambda_total(PROBES[0], roots, p, case)
    eigvec = float(np.linalg.norm(transfers[0] @ phi - lam0 * phi) / np.linalg.norm(phi))
    return {
        "roots": [_complex_to(u) for u in roots],
        "bethe_residuals": [float(abs(e)) for e in resid],
        "max_residual": float(np.max(np.abs(resid))) if len(resid) else 0.0,
        "null_ratio": null_ratio(roots, p, case),
        "matches": matches,
        "eigenvector_residual": eigvec,
    }


def hamiltonian_cross_check(
    config: RunConfig, n: int, case: str, sector_m: int | None, starts: int, seed: int
) -> dict:
    """Energies from the derivative of Lambda at u = 1 on the homogeneous chain vs spectrum(H)."""
    p = config.model_params(n, case).homogeneous()
    q = p.q
    hspec = spectrum(hamiltonian_for(p))
    scale = max(1.0, float(np.max(np.abs(hspec))))
    shift = hamiltonian_shift(n, q)
    energies = []
    for m, res in _solve(case, p, sector_m, starts, seed).items():
        for rs in res.root_sets:
            lam = lambda x, r=rs.roots: lambda_total(x, r, p, case)  # noqa: E731
            try:
                e = (q - 1 / q) / 2 * derivative(lam, 1.0) / lam(1.0) - shift
            except ZeroDivisionError:
                continue
            dist = float(np.min(np.abs(hspec - e)) / scale)
            energies.append({"m": m, "energy": _complex_to(e), "distance": dist})
    return {
        "energies": energies,
        "matched": sum(e["distance"] < MATCH_TOL for e in energies),
        "spectrum_size": len(hspec),
    }

