import numpy as np
import pytest

from bethe_segment.tensor import SIGMA_PLUS, relative_residual
from bethe_segment.vertex import (
    BulkParams,
    PoleError,
    build_comonodromy,
    build_monodromy,
    build_r,
    comonodromy_by_transposition,
    fn_b,
    izergin_z,
    l12_interpolation_residual,
    l12_string,
    l_relation_residuals,
    mono_product,
    qdet_product,
    quantum_determinant,
    rll_residual,
    vacuum_lambdas,
    ybe_residual,
)
from bethe_segment.states import covacuum, vacuum

from conftest import Q


def test_b_values():
    assert fn_b(1.0, Q) == 0
    assert fn_b(Q, Q) == pytest.approx(1.0)
    assert fn_b(3.0, 2.0) == pytest.approx(16 / 9, rel=1e-15)
    with pytest.raises(PoleError):
        fn_b(2.0, 1.0)


def test_r_matrix_examples():
    perm = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
    assert np.allclose(build_r(1.0, Q), perm, atol=1e-15)
    u = 0.7 + 0.4j
    r = build_r(u, Q)
    assert r[0, 0] == r[3, 3] == fn_b(Q * u, Q)
    assert build_r(1 / Q, Q)[1, 1] == pytest.approx(-1.0)


def test_ybe(sampler):
    for _ in range(20):
        ua, ub, uc = sampler.points(3, BulkParams(Q, ()))
        assert ybe_residual(ua, ub, uc, Q) < 1e-12
    assert ybe_residual(1.3, 1.3, 0.4 + 1j, Q) < 1e-12


def test_monodromy_single_site():
    u = 0.8 + 0.5j
    mono = build_monodromy(u, BulkParams(Q, (1.0,)))
    assert np.allclose(mono.l11, np.diag([fn_b(Q * u, Q), fn_b(u, Q)]))
    assert np.allclose(mono.l21, SIGMA_PLUS)


def test_monodromy_vacuum_action(sampler):
    p = sampler.bulk(3, Q)
    (u,) = sampler.points(1, p)
    mono = build_monodromy(u, p)
    om = vacuum(3)
    lam1, lam2 = vacuum_lambdas(u, p)
    assert np.allclose(mono.l11 @ om, np.prod([fn_b(Q * u / v, Q) for v in p.v]) * om)
    assert np.allclose(mono.l21 @ om, 0)
    assert np.linalg.norm(mono.l22 @ om - lam2 * om) < 1e-12 * max(1, abs(lam2))
    assert lam1 == pytest.approx(np.prod([fn_b(Q * u / v, Q) for v in p.v]))


def test_vacuum_lambdas_examples():
    p = BulkParams(Q, (1.1 + 0.2j,))
    assert vacuum_lambdas(p.v[0], p)[1] == 0
    assert vacuum_lambdas(0.3, BulkParams(Q, ())) == (1.0, 1.0)


def test_comonodromy_matches_transposition(sampler):
    p = sampler.bulk(2, Q)
    (x,) = sampler.points(1, p)
    # build_comonodromy(u) is the co-matrix at q^-2 u^-1
    a = build_comonodromy(x, p)
    b = comonodromy_by_transposition(1 / (Q**2 * x), p)
    assert relative_residual(a.full(), b.full()) < 1e-11


def test_inverse_relation(sampler):
    p = sampler.bulk(2, Q)
    (x,) = sampler.points(1, p)
    prod = mono_product(build_monodromy(x, p), comonodromy_by_transposition(x / Q**2, p))
    scalar = qdet_product(x / Q, p)
    assert relative_residual(prod.full(), scalar * np.eye(8)) < 1e-11


def test_quantum_determinant(sampler):
    u = 0.6 + 0.9j
    p1 = BulkParams(Q, (1.0,))
    assert quantum_determinant(u, p1) == pytest.approx(fn_b(Q * Q * u, Q) * fn_b(u, Q))
    p3 = sampler.bulk(3, Q)
    assert quantum_determinant(u, p3) == pytest.approx(qdet_product(u, p3), rel=1e-10)
    assert abs(qdet_product(p3.v[0], p3)) == 0


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_rll_and_l_relations(sampler, n):
    p = sampler.bulk(n, Q)
    u, v = sampler.points(2, p)
    assert rll_residual(u, v, p) < 1e-10
    for name, res in l_relation_residuals(u, v, p).items():
        assert res < 1e-10, name


def test_izergin_examples(sampler):
    p1 = BulkParams(Q, (0.9 + 0.3j,))
    assert izergin_z([1.4 - 0.2j], p1) == pytest.approx(1.0)
    p2 = sampler.bulk(2, Q)
    us = sampler.points(2, p2)
    top = l12_string(us, p2, vacuum(2)) @ covacuum(2)
    assert abs(top - izergin_z(us, p2)) < 1e-10 * abs(top)
    (w,) = sampler.points(1, p2, avoid=us)
    assert np.linalg.norm(l12_string([w, *us], p2, vacuum(2))) == 0


def test_izergin_symmetry(sampler):
    p = sampler.bulk(4, Q)
    us = sampler.points(4, p)
    z = izergin_z(us, p)
    assert izergin_z(us[::-1], p) == pytest.approx(z, rel=1e-10)
    pv = BulkParams(Q, p.v[::-1])
    assert izergin_z(us, pv) == pytest.approx(z, rel=1e-10)


def test_izergin_rejects_coincident_roots():
    p = BulkParams(Q, (1.1, 0.7 + 0.2j))
    with pytest.raises(PoleError):
        izergin_z([0.5 + 0.5j, 0.5 + 0.5j], p)


def test_l12_interpolation(sampler):
    p = sampler.bulk(2, Q)
    u, u1, u2 = sampler.points(3, p)
    assert l12_interpolation_residual(u, u1, u2, p) < 1e-11
    with pytest.raises(ValueError):
        l12_interpolation_residual(u, u1, u2, sampler.bulk(3, Q))


def test_admissibility():
    assert BulkParams(Q, (1.0, 1.3)).admissibility_problems() == []
    assert BulkParams(Q, (1.0, Q)).admissibility_problems()
    assert BulkParams(np.exp(2j * np.pi / 3), (1.0,)).admissibility_problems()
    with pytest.raises(ValueError):
        BulkParams(Q, (1.0, 1.0)).check()
