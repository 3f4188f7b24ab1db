import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from bethe_segment.bethe import (
    RootSet,
    bethe_residual_d,
    bethe_residual_g,
    bethe_residual_total,
    bethe_residuals,
    canonical_root,
    canonicalize,
    lambda_d,
    lambda_g,
    lambda_total,
    residual_by_limit,
    zd_partition,
)
from bethe_segment.boundary import LeftBoundary, ModelParams, RightBoundary
from bethe_segment.functions import FUNCTION_NAMES, ScalarFunctions, crossing_residuals, eval_fn
from bethe_segment.states import scalar_product_sup
from bethe_segment.vertex import BulkParams, PoleError, fn_b, vacuum_lambdas

from conftest import Q

P1 = ModelParams(BulkParams(Q, (1.08 + 0.17j,)), LeftBoundary(0.9 - 0.3j, 1.2 + 0.4j), RightBoundary(1.1 + 0.35j, 0.7 - 0.45j))


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


polar = st.tuples(st.floats(0.5, 2.0), st.floats(0, 2 * np.pi)).map(lambda t: complex(t[0] * np.exp(1j * t[1])))


@given(polar, polar)
@settings(max_examples=60, deadline=None)
def test_crossing_identities(u, v):
    fx = ScalarFunctions(P1)
    for x in (u / v, u * v, Q * u * v, Q * u / v, Q * v / u, Q * Q * u * v, u * v * Q**-1):
        assume(abs(fn_b(x, Q)) > 1e-3)
    for name, r in crossing_residuals(u, v, P1).items():
        assert r < 1e-11, name
    assert fx.f(fx.cross(u), v) == pytest.approx(fx.h(u, v), rel=1e-11)


def test_pole_guard():
    fx = ScalarFunctions(P1)
    with pytest.raises(PoleError):
        fx.f(0.7 + 0.2j, 0.7 + 0.2j)


def test_F_factorization():
    fx = ScalarFunctions(P1)
    u, v = 0.8 + 0.3j, 1.3 - 0.5j
    expected = 1 / (fx.b(u / v) * fx.b(Q * u * v)) * fx.b(Q * Q * u * u) / fx.phi(v)
    assert fx.F(u, v) == pytest.approx(expected, rel=1e-14)


def test_function_lookup():
    for name in FUNCTION_NAMES:
        args = (0.8 + 0.3j,) if name in ("b", "c", "phi", "k_minus", "k_plus") else (0.8 + 0.3j, 1.3 - 0.5j)
        assert np.isfinite(eval_fn(name, args, P1))
    with pytest.raises(KeyError):
        eval_fn("nope", (1.0,), P1)


def test_big_lambda_examples():
    fx = ScalarFunctions(P1)
    v1 = P1.v[0]
    assert abs(fx.big_lambda(v1 / Q)) < 1e-14
    empty = ModelParams(BulkParams(Q, ()))
    assert ScalarFunctions(empty).big_lambda(0.7) == 1
    p = ModelParams(BulkParams(Q, (1.08 + 0.17j, 0.91 - 0.23j)))
    u = 0.6 + 0.8j
    lam1, _ = vacuum_lambdas(u, p.bulk)
    _, lam2 = vacuum_lambdas(1 / (Q * u), p.bulk)
    assert ScalarFunctions(p).big_lambda(u) == pytest.approx(lam1 * lam2, rel=1e-13)


def test_lambda_d_vacuum():
    fx = ScalarFunctions(P1)
    u = 0.7 + 0.6j
    assert lambda_d(u, [], P1) == pytest.approx(fx.psi(u) + fx.psi(fx.cross(u)))


@pytest.mark.parametrize("case", ["diag", "lower_upper"])
def test_eigenvalue_symmetries(model, sampler, case):
    p = model(3, case)
    pts = sampler.points(4, p)
    u, us = pts[0], pts[1:]
    fns = [lambda_d] + ([lambda_g, lambda_total] if case == "lower_upper" else [])
    for fn in fns:
        ref = fn(u, us, p)
        assert _rel(fn(u, us[::-1], p), ref) < 1e-10
        assert _rel(fn(1 / (p.q * u), us, p), ref) < 1e-10
        crossed = [us[0], 1 / (p.q * us[1]), us[2]]
        assert _rel(fn(u, crossed, p), ref) < 1e-10


def test_lambda_g_needs_full_sector(model):
    p = model(2, "lower_upper")
    with pytest.raises(ValueError):
        lambda_g(0.7, [0.9], p)
    with pytest.raises(ValueError):
        bethe_residual_g(0, [0.9], p)


@pytest.mark.parametrize("case", ["diag", "lower_upper"])
def test_residuals_are_limits(model, sampler, case):
    p = model(2, case)
    us = sampler.points(2, p)
    for i in range(2):
        assert _rel(residual_by_limit(i, us, p, "d"), bethe_residual_d(i, us, p)) < 1e-7
        if case == "lower_upper":
            assert _rel(residual_by_limit(i, us, p, "g"), bethe_residual_g(i, us, p)) < 1e-7


def test_residual_g_trivial_cases(model, sampler):
    p = model(2, "lower_upper")
    us = sampler.points(2, p)
    assert bethe_residual_g(0, us, p.with_right(tau=0)) == 0
    assert bethe_residual_g(0, us, p.with_left(kappa=0)) == 0
    # with tau kappa = 0 the total reduces to the diagonal branch
    p0 = p.with_right(tau=0)
    assert bethe_residual_total(1, us, p0) == bethe_residual_d(1, us, p0)


def test_residual_d_double_zero(model):
    # psi(u) vanishes at u = v_1 / q through Lambda; psi(1/(qu)) is made to vanish
    # there through k+ by choosing eps_minus = -eps_plus w^2 with w = 1/(qu)
    p = model(1, "diag")
    u = p.v[0] / p.q
    w = 1 / (p.q * u)
    p = p.with_left(eps_minus=-p.left.eps_plus * w * w)
    fx = ScalarFunctions(p)
    assert abs(fx.psi(u)) < 1e-13 and abs(fx.psi(w)) < 1e-13
    assert abs(bethe_residual_d(0, [u], p)) < 1e-12
    assert abs(bethe_residual_d(0, [1.3 * u], p)) > 1e-3


def test_offshell_residuals_nonzero(model, sampler):
    p = model(2, "lower_upper")
    us = sampler.points(2, p)
    assert np.all(np.abs(bethe_residuals(us, p, "lower_upper")) > 1e-6)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_zd_partition(model, sampler, n):
    p = model(n, "diag")
    us = sampler.points(n, p)
    z = zd_partition(us, p)
    assert _rel(z, scalar_product_sup([], us, p)) < 1e-9
    assert _rel(zd_partition(us[::-1], p), z) < 1e-10


def test_zd_partition_checks(model):
    p = model(2, "diag")
    with pytest.raises(ValueError):
        zd_partition([0.7], p)


def test_canonicalization():
    u = 0.4 + 0.3j
    reps = {canonical_root(x, Q) for x in (u, -u, 1 / (Q * u), -1 / (Q * u))}
    assert len(reps) == 1
    rep = reps.pop()
    assert abs(rep) >= abs(1 / (Q * rep)) and rep.real > 0
    a = canonicalize([u, 1.3 - 0.2j], Q)
    b = canonicalize([1 / (Q * 1.3 - Q * 0.2j), -u], Q)
    assert np.allclose(a.roots, b.roots, rtol=1e-14)
    assert isinstance(a, RootSet) and a.sector_m == 2
