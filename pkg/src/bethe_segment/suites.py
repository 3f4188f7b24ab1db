"""Property suites: one per invariant of each module, registered by suite id."""

from __future__ import annotations

import time
from typing import Callable

import numpy as np

from . import algebra, bethe, boundary, functions, states, tensor, vertex
from .boundary import LeftBoundary, ModelParams, RightBoundary
from .harness import CASE_NAMES, PROBES, RunConfig, SuiteContext, emit_report, register, run_suite
from .solver import solve_sectors
from .vertex import BulkParams, PoleError

RETRIES = 50
NILPOTENT_TOL = 1e-14


def _rel(a: complex, b: complex) -> float:
    scale = max(abs(a), abs(b))
    return float(abs(a - b) / scale) if scale > 0 else 0.0


def _sample(ctx: SuiteContext, name: str, tol: float, fn: Callable[[], float | dict], count: int = 1) -> None:
    """Record ``count`` draws of ``fn``; draws that hit a pole are redrawn."""
    for _ in range(count):
        for _ in range(RETRIES):
            start = time.perf_counter()
            try:
                out = fn()
            except (PoleError, ZeroDivisionError):
                continue
            break
        else:
            raise RuntimeError(f"{ctx.suite_id}:{name}: every draw hit a pole")
        if isinstance(out, dict):
            for key, val in out.items():
                ctx.record(f"{name}.{key}", val, tol, start)
        else:
            ctx.record(name, out, tol, start)


def _q(ctx: SuiteContext) -> complex:
    """Random anisotropy kept away from low-order roots of unity."""
    while True:
        q = ctx.sampler.scalar()
        if min(abs(q**k - 1) for k in range(1, 5)) > 0.1:
            return q


def _model(ctx: SuiteContext, n: int, case: str) -> ModelParams:
    return ctx.sampler.model(n, _q(ctx), case)


def _bulk(ctx: SuiteContext, n: int) -> BulkParams:
    return ctx.sampler.bulk(n, _q(ctx))


def _op_tol() -> float:
    return tensor.operator_tol()


# ---------------------------------------------------------------------------
# tensor-kernel


@register("embed-commute", "tensor-kernel", "local operators on distinct sites commute")
def _embed_commute(ctx):
    s = ctx.sampler

    def one():
        n = int(s.rng.integers(2, 7))
        i, j = s.rng.choice(np.arange(1, n + 1), size=2, replace=False)
        a = tensor.embed_local(s.matrix((2, 2)), int(i), n)
        b = tensor.embed_local(s.matrix((2, 2)), int(j), n)
        return tensor.residual(a @ b, b @ a)

    _sample(ctx, "distinct-sites", 1e-14, one, 50)


@register("triangular-spectrum", "tensor-kernel", "spectrum of a triangular matrix is its diagonal")
def _triangular_spectrum(ctx):
    s = ctx.sampler

    def one():
        d = int(s.rng.integers(2, 33))
        mat = np.triu(s.matrix((d, d)))
        vals = tensor.spectrum(mat)
        diag = np.diag(mat)
        scale = max(1.0, float(np.max(np.abs(diag))))
        return max(float(np.min(np.abs(vals - x))) for x in diag) / scale

    _sample(ctx, "diagonal", 1e-10, one, 30)


@register("kron-mixed-product", "tensor-kernel", "kron(a,b) kron(c,d) = kron(ac,bd) on 2x2 blocks")
def _kron_mixed(ctx):
    s = ctx.sampler

    def one():
        a, b, c, d = (s.matrix((2, 2)) for _ in range(4))
        return tensor.residual(tensor.kron(a, b) @ tensor.kron(c, d), tensor.kron(a @ c, b @ d))

    _sample(ctx, "mixed-product", 1e-13, one, 100)


# ---------------------------------------------------------------------------
# vertex-model


@register("ybe", "vertex-model", "Yang-Baxter equation for the R-matrix, 100 random samples")
def _ybe(ctx):
    def one():
        q = _q(ctx)
        ua, ub, uc = ctx.sampler.points(3, BulkParams(q, ()))
        return vertex.ybe_residual(ua, ub, uc, q)

    _sample(ctx, "ybe", 1e-11, one, 100)


@register("rll", "vertex-model", "RLL relation as a dense matrix identity, n = 1..4")
def _rll(ctx):
    sizes = ctx.sizes(range(1, 5))
    for n in sizes:
        def one(n=n):
            p = _bulk(ctx, n)
            u, v = ctx.sampler.points(2, p)
            return vertex.rll_residual(u, v, p)

        _sample(ctx, f"n{n}", 1e-11, one, -(-100 // len(sizes)))


@register("l-relations", "vertex-model", "exchange relations of the l_ij entries, n = 1..4")
def _l_relations(ctx):
    for n in ctx.sizes(range(1, 5)):
        def one(n=n):
            p = _bulk(ctx, n)
            u, v = ctx.sampler.points(2, p)
            return vertex.l_relation_residuals(u, v, p)

        _sample(ctx, f"n{n}", _op_tol(), one, 20)


@register("izergin-symmetry", "vertex-model", "Izergin determinant symmetric in u and in v")
def _izergin_symmetry(ctx):
    s = ctx.sampler
    for n in ctx.sizes(range(1, 5)):
        def one(n=n):
            p = _bulk(ctx, n)
            us = s.points(n, p)
            z = vertex.izergin_z(us, p)
            pu = [us[k] for k in s.rng.permutation(n)]
            pv = BulkParams(p.q, tuple(p.v[k] for k in s.rng.permutation(n)))
            return {"u": _rel(vertex.izergin_z(pu, p), z), "v": _rel(vertex.izergin_z(us, pv), z)}

        _sample(ctx, f"n{n}", 1e-10, one, 20)


@register("l12-interpolation", "vertex-model", "n = 2: l12(u) is fixed by its values at two points")
def _l12_interpolation(ctx):
    if not ctx.sizes([2]):
        return

    def one():
        p = _bulk(ctx, 2)
        u, u1, u2 = ctx.sampler.points(3, p)
        return vertex.l12_interpolation_residual(u, u1, u2, p)

    _sample(ctx, "n2", 1e-11, one, 50)


# ---------------------------------------------------------------------------
# boundary-algebra


def _right(ctx) -> RightBoundary:
    return RightBoundary(*(ctx.sampler.scalar() for _ in range(4)))


def _left(ctx) -> LeftBoundary:
    return LeftBoundary(*(ctx.sampler.scalar() for _ in range(4)))


@register("reflection", "boundary-algebra", "reflection and dual reflection equations, 100 samples each")
def _reflection(ctx):
    def re():
        q = _q(ctx)
        u1, u2 = ctx.sampler.points(2, BulkParams(q, ()))
        return boundary.re_residual(u1, u2, _right(ctx), q)

    def dre():
        q = _q(ctx)
        u1, u2 = ctx.sampler.points(2, BulkParams(q, ()))
        return boundary.dre_residual(u1, u2, _left(ctx), q)

    _sample(ctx, "re", 1e-12, re, 100)
    _sample(ctx, "dre", 1e-12, dre, 100)


@register("reflection-algebra", "boundary-algebra", "the ten A/B/C/D exchange relations, N = 2..4")
def _reflection_algebra(ctx):
    for n in ctx.sizes(range(2, 5)):
        def one(n=n):
            p = _model(ctx, n, "upper_upper")
            u, v = ctx.sampler.points(2, p)
            return algebra.reflection_algebra_residuals(u, v, p)

        _sample(ctx, f"n{n}", _op_tol(), one, 20)


@register("uwt-identities", "boundary-algebra", "the two scalar identities for k+ and k-")
def _uwt(ctx):
    def one():
        p = _model(ctx, 1, "upper_upper")
        u, v = ctx.sampler.points(2, p)
        return functions.id_uwt_residuals(u, v, p)

    _sample(ctx, "uwt", 1e-12, one, 50)


@register("shifted-relations", "boundary-algebra", "m-shifted exchange relations, N <= 3, m in {-4,-2,0,2}")
def _shifted(ctx):
    for n in ctx.sizes(range(1, 4)):
        for m in algebra.SHIFTS:
            def upper(n=n, m=m):
                p = _model(ctx, n, "upper_upper")
                u, v = ctx.sampler.points(2, p)
                return algebra.shifted_upper_residuals(u, v, m, p)

            def lower(n=n, m=m):
                p = _model(ctx, n, "lower_upper")
                u, v = ctx.sampler.points(2, p)
                return algebra.shifted_lower_residuals(u, v, m, p)

            _sample(ctx, f"upper.n{n}.m{m}", _op_tol(), upper, 5)
            _sample(ctx, f"lower.n{n}.m{m}", _op_tol(), lower, 5)


@register("diag-nilpotency", "boundary-algebra", "B(u) annihilates the all-down vector when tau = 0")
def _diag_nilpotency(ctx):
    for n in ctx.sizes(range(1, 5)):
        def one(n=n):
            p = _model(ctx, n, "diag")
            (u,) = ctx.sampler.points(1, p)
            return algebra.covacuum_nilpotency_residual(u, p)

        _sample(ctx, f"n{n}", 1e-12, one, 20)


@register("vacuum-actions", "boundary-algebra", "A, D diagonal and C zero on the all-up vector, plain and shifted")
def _vacuum(ctx):
    for n in ctx.sizes(range(1, 5)):
        def plain(n=n):
            p = _model(ctx, n, "upper_upper")
            (u,) = ctx.sampler.points(1, p)
            return algebra.vacuum_action_residuals(u, p)

        _sample(ctx, f"n{n}", _op_tol(), plain, 10)
        for case in ("upper_upper", "lower_upper"):
            def shifted(n=n, case=case):
                p = _model(ctx, n, case)
                (u,) = ctx.sampler.points(1, p)
                m = int(ctx.sampler.rng.choice(algebra.SHIFTS))
                return algebra.shifted_vacuum_residuals(u, m, p)

            _sample(ctx, f"shifted.{case}.n{n}", _op_tol(), shifted, 10)


@register("transfer-commute", "boundary-algebra", "[t(u), t(v)] = 0 in every case")
def _transfer_commute(ctx):
    for case in ctx.cases():
        for n in ctx.sizes(range(1, 5)):
            def one(n=n, case=case):
                p = _model(ctx, n, case)
                u, v = ctx.sampler.points(2, p)
                return algebra.transfer_commutator_residual(u, v, p, case)

            _sample(ctx, f"{case}.n{n}", _op_tol(), one, 5)


@register("transfer-rewrite", "boundary-algebra", "transfer matrices rewritten with shifted diagonal operators")
def _transfer_rewrite(ctx):
    for case in ctx.cases(("upper_upper", "lower_upper")):
        for n in ctx.sizes(range(1, 5)):
            def one(n=n, case=case):
                p = _model(ctx, n, case)
                (u,) = ctx.sampler.points(1, p)
                return algebra.transfer_rewrite_residual(u, p, case)

            _sample(ctx, f"{case}.n{n}", _op_tol(), one, 10)


HAMILTONIAN_DRAWS = ("diag", "upper_upper", "lower_upper", "general")


@register("hamiltonian", "boundary-algebra", "log-derivative of t(u) at u = 1 vs the direct Hamiltonian, N = 1..5")
def _hamiltonian(ctx):
    def draw(n, kind):
        while True:
            p = _model(ctx, n, "upper_upper" if kind == "general" else kind)
            if kind == "general":
                p = p.with_left(kappa=ctx.sampler.scalar())
            left, right = p.left, p.right
            if abs(left.eps_plus + left.eps_minus) > 0.2 and abs(right.nu_plus + right.nu_minus) > 0.2:
                return p

    for n in ctx.sizes(range(1, 6)):
        for kind in HAMILTONIAN_DRAWS:
            def one(n=n, kind=kind):
                p = draw(n, kind)
                diff = boundary.build_hamiltonian_from_transfer(p) - boundary.hamiltonian_for(p)
                return float(np.max(np.abs(diff)))

            _sample(ctx, f"{kind}.n{n}", 1e-7, one, 3)


# ---------------------------------------------------------------------------
# bethe-functions


@register("crossing-identities", "bethe-functions", "f, h, m under v -> 1/(qv) and f(1/(qu), v) = h(u, v)")
def _crossing(ctx):
    def one():
        p = _model(ctx, 1, "diag")
        u, v = ctx.sampler.points(2, p)
        return functions.crossing_residuals(u, v, p)

    _sample(ctx, "crossing", 1e-11, one, 50)


def _branch_fns(case: str):
    if case == "lower_upper":
        return {"d": bethe.lambda_d, "g": bethe.lambda_g, "total": lambda u, r, p: bethe.lambda_total(u, r, p, case)}
    return {"d": bethe.lambda_d}


@register("eigenvalue-symmetry", "bethe-functions", "Lambda branches: root permutations and crossing images")
def _eigenvalue_symmetry(ctx):
    s = ctx.sampler
    for case in ctx.cases(("diag", "lower_upper")):
        for n in ctx.sizes(range(1, 5)):
            def one(n=n, case=case):
                p = _model(ctx, n, case)
                m = n if case == "lower_upper" else int(s.rng.integers(1, n + 1))
                pts = s.points(m + 1, p)
                u, us = pts[0], pts[1:]
                perm = [us[k] for k in s.rng.permutation(m)]
                j = int(s.rng.integers(m))
                crossed = list(us)
                crossed[j] = 1 / (p.q * us[j])
                out = {}
                for name, lam in _branch_fns(case).items():
                    ref = lam(u, us, p)
                    out[f"{name}.perm"] = _rel(lam(u, perm, p), ref)
                    out[f"{name}.cross-u"] = _rel(lam(1 / (p.q * u), us, p), ref)
                    out[f"{name}.cross-root"] = _rel(lam(u, crossed, p), ref)
                return out

            _sample(ctx, f"{case}.n{n}", 1e-10, one, 10)


@register("residual-limits", "bethe-functions", "Bethe residuals as weighted limits of the eigenvalue branches")
def _residual_limits(ctx):
    s = ctx.sampler
    for case in ctx.cases(("diag", "lower_upper")):
        for n in ctx.sizes(range(1, 4)):
            def one(n=n, case=case):
                p = _model(ctx, n, case)
                m = n if case == "lower_upper" else int(s.rng.integers(1, n + 1))
                us = s.points(m, p)
                i = int(s.rng.integers(m))
                out = {"d": _rel(bethe.residual_by_limit(i, us, p, "d"), bethe.bethe_residual_d(i, us, p))}
                if case == "lower_upper":
                    out["g"] = _rel(bethe.residual_by_limit(i, us, p, "g"), bethe.bethe_residual_g(i, us, p))
                return out

            _sample(ctx, f"{case}.n{n}", 1e-7, one, 10)


ONSHELL_DEFAULT = (("lower_upper", 1), ("lower_upper", 2), ("upper_upper", 2), ("diag", 3))


def _onshell_runs(ctx) -> list[tuple[str, int]]:
    if ctx.config.n is None:
        return [(c, n) for c, n in ONSHELL_DEFAULT if c in ctx.cases()]
    return [(c, ctx.config.n) for c in ctx.cases()]


@register("onshell-eigenvalue", "bethe-functions", "solver roots: Lambda matches exact transfer eigenvalues")
def _onshell(ctx):
    cfg = ctx.config
    for case, n in _onshell_runs(ctx):
        start = time.perf_counter()
        p = cfg.model_params(n, case)
        transfers = [boundary.build_transfer(x, p, case) for x in PROBES]
        eigs = [tensor.spectrum(t) for t in transfers]
        scale = [max(1.0, float(np.max(np.abs(e)))) for e in eigs]
        missing = 0
        for res in solve_sectors(case, p, None, cfg.starts, cfg.seed).values():
            sets = res.root_sets
            missing += not sets
            for rs in sets:
                res = bethe.bethe_residuals(rs.roots, p, case)
                ctx.record(f"{case}.n{n}.bethe", float(np.max(np.abs(res))) if len(res) else 0.0, 1e-9, start)
                dist = max(
                    float(np.min(np.abs(ev - bethe.lambda_total(x, rs.roots, p, case)))) / sc
                    for x, ev, sc in zip(PROBES, eigs, scale)
                )
                ctx.record(f"{case}.n{n}.match", dist, 1e-8, start)
                phi = states.build_bethe_vector(rs.roots, p, case).state
                lam = bethe.lambda_total(PROBES[0], rs.roots, p, case)
                vec = float(np.linalg.norm(transfers[0] @ phi - lam * phi) / np.linalg.norm(phi))
                ctx.record(f"{case}.n{n}.eigenvector", vec, 1e-8, start)
                start = time.perf_counter()
        ctx.record(f"{case}.n{n}.sectors-without-solution", missing, 0.5, start)


# ---------------------------------------------------------------------------
# state-builder


@register("bv-permutation", "state-builder", "Bethe vectors are symmetric in their roots")
def _bv_permutation(ctx):
    s = ctx.sampler
    for case in ctx.cases():
        for n in ctx.sizes(range(1, 5)):
            def one(n=n, case=case):
                p = _model(ctx, n, case)
                m = n if case == "lower_upper" else int(s.rng.integers(1, n + 1))
                us = s.points(m, p)
                perm = [us[k] for k in s.rng.permutation(m)]
                a = states.build_bethe_vector(us, p, case).state
                b = states.build_bethe_vector(perm, p, case).state
                return tensor.relative_residual(a, b)

            _sample(ctx, f"{case}.n{n}", 1e-10, one, 5)


@register("nilpotency-chain", "state-builder", "l12 applied N+1 times kills |Omega>; N times gives the Izergin coefficient")
def _nilpotency_chain(ctx):
    for n in ctx.sizes(range(1, 5)):
        def one(n=n):
            p = _bulk(ctx, n)
            us = ctx.sampler.points(n + 1, p)
            top = vertex.l12_string(us[:n], p, states.vacuum(n))
            over = vertex.l12_string(us, p, states.vacuum(n))
            scale = float(np.prod([np.linalg.norm(vertex.build_monodromy(u, p).l12, 2) for u in us]))
            return {
                "vanishing": float(np.linalg.norm(over)) / scale,
                "izergin": _rel(top[-1], vertex.izergin_z(us[:n], p)),
            }

        _sample(ctx, f"n{n}", 1e-9, one, 10)


def _m_and_roots(ctx, p, case):
    m = p.n if case == "lower_upper" else int(ctx.sampler.rng.integers(0, p.n + 1))
    pts = ctx.sampler.points(m + 1, p)
    return pts[0], pts[1:]


@register("offshell-diag", "state-builder", "off-shell action of t_d on Phi_d, M <= N <= 4")
def _offshell_diag(ctx):
    if not ctx.cases(("diag",)):
        return
    for n in ctx.sizes(range(1, 5)):
        def one(n=n):
            p = _model(ctx, n, "diag")
            u, us = _m_and_roots(ctx, p, "diag")
            return {
                "diagonal-transfer": states.diagonal_offshell_residual(u, us, p),
                "transfer": states.offshell_transfer_residual(u, us, p, "diag"),
            }

        _sample(ctx, f"n{n}", 1e-9, one, 10)


@register("offshell-upper", "state-builder", "off-shell action of the upper/upper transfer matrix, M <= N <= 3")
def _offshell_upper(ctx):
    if not ctx.cases(("upper_upper",)):
        return
    for n in ctx.sizes(range(1, 4)):
        def one(n=n):
            p = _model(ctx, n, "upper_upper")
            u, us = _m_and_roots(ctx, p, "upper_upper")
            return states.offshell_transfer_residual(u, us, p, "upper_upper")

        _sample(ctx, f"n{n}", 1e-9, one, 10)


@register("conjecture", "state-builder", "off-shell action of B(u) on the full-sector lower/upper vector, N = 1..4")
def _conjecture(ctx):
    if not ctx.cases(("lower_upper",)):
        return
    for n in ctx.sizes(range(1, 5)):
        def one(n=n):
            p = _model(ctx, n, "lower_upper")
            u, us = _m_and_roots(ctx, p, "lower_upper")
            return states.creation_action_residual(u, us, p)

        _sample(ctx, f"n{n}", 1e-9, one, 10)


@register("main-result", "state-builder", "off-shell action of the lower/upper transfer matrix, N <= 4, two routes")
def _main_result(ctx):
    if not ctx.cases(("lower_upper",)):
        return
    for n in ctx.sizes(range(1, 5)):
        def one(n=n):
            p = _model(ctx, n, "lower_upper")
            u, us = _m_and_roots(ctx, p, "lower_upper")
            return {
                "direct": states.offshell_transfer_residual(u, us, p, "lower_upper"),
                "split": states.split_transfer_residual(u, us, p),
            }

        _sample(ctx, f"n{n}", 1e-9, one, 10)


@register("zd-partition", "state-builder", "reflecting-end determinant vs the all-down overlap of B...B|Omega>")
def _zd(ctx):
    for n in ctx.sizes(range(1, 5)):
        def one(n=n):
            p = _model(ctx, n, "diag")
            us = ctx.sampler.points(n, p)
            return _rel(bethe.zd_partition(us, p), states.scalar_product_sup([], us, p))

        _sample(ctx, f"n{n}", 1e-9, one, 10)


@register("scalar-products", "state-builder", "all-down overlaps: zero, determinant, and recursion, N <= 3")
def _scalar_products(ctx):
    s = ctx.sampler
    for n in ctx.sizes(range(1, 4)):
        def one(n=n):
            # tau != 0, otherwise every overlap with N+1 operators vanishes
            p = _model(ctx, n, "lower_upper")
            out = {}
            if n > 1:
                k = int(s.rng.integers(1, n))
                pts = s.points(k, p)
                scale = float(np.prod([np.linalg.norm(boundary.build_double_row(x, p).B, 2) for x in pts]))
                out["below"] = abs(states.scalar_product_sup(pts[:1], pts[1:], p)) / scale
            pts = s.points(n + 1, p)
            out["full"] = _rel(states.scalar_product_sup(pts[:1], pts[1:n], p), bethe.zd_partition(pts[:n], p))
            out["recursion"] = _rel(
                states.scalar_product_recursive(pts[:1], pts[1:], p), states.scalar_product_sup(pts[:1], pts[1:], p)
            )
            return out

        _sample(ctx, f"n{n}", 1e-9, one, 10)


@register("explicit-vectors", "state-builder", "N = 1, 2 Bethe vectors written with l12 against B...B|Omega>")
def _explicit(ctx):
    def n1():
        p = _model(ctx, 1, "upper_upper")
        (u,) = ctx.sampler.points(1, p)
        return tensor.relative_residual(states.explicit_bv_n1(u, p), states.build_phi_d([u], p).state)

    def n2():
        p = _model(ctx, 2, "upper_upper")
        u1, u2 = ctx.sampler.points(2, p)
        return tensor.relative_residual(states.explicit_bv_n2(u1, u2, p), states.build_phi_d([u1, u2], p).state)

    sizes = ctx.sizes((1, 2))
    if 1 in sizes:
        _sample(ctx, "n1", 1e-10, n1, 20)
    if 2 in sizes:
        _sample(ctx, "n2", 1e-10, n2, 20)


# ---------------------------------------------------------------------------
# harness-cli


@register("determinism", "harness-cli", "same config and seed give byte-identical reports; config round-trips")
def _determinism(ctx):
    start = time.perf_counter()
    cfg = ctx.config
    for sid in ("kron-mixed-product", "crossing-identities"):
        a = emit_report(run_suite(sid, cfg), "json")
        b = emit_report(run_suite(sid, cfg), "json")
        ctx.record(f"reports.{sid}", float(a != b), 0.5, start)
        start = time.perf_counter()
    back = RunConfig.from_json(cfg.to_json())
    ctx.record("config-roundtrip", float(back != cfg or back.to_json() != cfg.to_json()), 0.5, start)

