import numpy as np
import pytest

from bethe_segment import algebra
from bethe_segment.boundary import (
    LeftBoundary,
    ModelParams,
    RightBoundary,
    build_double_row,
    build_hamiltonian_direct,
    build_hamiltonian_from_transfer,
    build_k_minus,
    build_k_plus,
    build_modified_ops_lower,
    build_modified_ops_upper,
    build_transfer,
    double_row_from_lij,
    dre_residual,
    fn_c,
    hamiltonian_for,
    hamiltonian_shift,
    k_minus,
    k_plus,
    map_boundary_params,
    re_residual,
)
from bethe_segment.functions import ScalarFunctions
from bethe_segment.tensor import SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z, commutator, relative_residual, total_spin_z
from bethe_segment.states import vacuum
from bethe_segment.vertex import BulkParams

from conftest import Q

RIGHT = RightBoundary(1.1 + 0.35j, 0.7 - 0.45j, 0.6 + 0.25j, 0)
LEFT = LeftBoundary(0.9 - 0.3j, 1.2 + 0.4j, 0.55 - 0.2j, 0.45 + 0.3j)


def test_k_minus_examples():
    u = 0.8 + 0.6j
    diag = RightBoundary(RIGHT.nu_plus, RIGHT.nu_minus, 0, 0)
    assert np.allclose(build_k_minus(u, diag), np.diag([k_minus(u, diag), k_minus(1 / u, diag)]))
    s = RIGHT.nu_minus + RIGHT.nu_plus
    assert np.allclose(build_k_minus(1.0, RIGHT), np.diag([s, s]))


def test_k_plus_examples():
    u = 0.8 + 0.6j
    diag = LeftBoundary(LEFT.eps_plus, LEFT.eps_minus, 0, 0)
    assert np.allclose(build_k_plus(u, diag, Q), np.diag([k_plus(Q * u, diag), k_plus(1 / (Q * u), diag)]))
    k = build_k_plus(1 / Q, LEFT, Q)
    # q * (1/q) is 1 only up to rounding
    assert abs(k[0, 1]) < 1e-15 and abs(k[1, 0]) < 1e-15


def test_reflection_equations(sampler):
    for _ in range(20):
        right = RightBoundary(*(sampler.scalar() for _ in range(4)))
        left = LeftBoundary(*(sampler.scalar() for _ in range(4)))
        u1, u2 = sampler.points(2, BulkParams(Q, ()))
        assert re_residual(u1, u2, right, Q) < 1e-12
        assert dre_residual(u1, u2, left, Q) < 1e-12


@pytest.mark.parametrize("n", [1, 2])
def test_double_row_matches_lij_assembly(model, sampler, n):
    p = model(n, "upper_upper")
    (u,) = sampler.points(1, p)
    a, b = build_double_row(u, p), double_row_from_lij(u, p)
    for name in "ABCD":
        assert relative_residual(getattr(a, name), getattr(b, name)) < 1e-10, name


def test_vacuum_actions(model, sampler):
    p = model(3, "upper_upper")
    (u,) = sampler.points(1, p)
    ops = build_double_row(u, p)
    fx = ScalarFunctions(p)
    om = vacuum(3)
    assert np.allclose(ops.A @ om, fx.k_minus(u) * fx.big_lambda(u) * om)
    assert np.linalg.norm(ops.C @ om) < 1e-12 * np.linalg.norm(ops.C)
    for name, res in algebra.vacuum_action_residuals(u, p).items():
        assert res < 1e-10, name


def test_double_row_needs_tau_tilde_zero():
    p = ModelParams(BulkParams(Q, (1.1,)), LEFT, RightBoundary(1, 1, 0, 0.3))
    with pytest.raises(ValueError):
        build_double_row(0.7, p)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_reflection_algebra(model, sampler, n):
    p = model(n, "upper_upper")
    u, v = sampler.points(2, p)
    res = algebra.reflection_algebra_residuals(u, v, p)
    assert set(res) == set(algebra.RELATION_NAMES)
    for name, r in res.items():
        assert r < 1e-10, name


def test_uwt_identities(model, sampler):
    for _ in range(10):
        from bethe_segment.functions import id_uwt_residuals

        p = model(1, "upper_upper")
        u, v = sampler.points(2, p)
        for name, r in id_uwt_residuals(u, v, p).items():
            assert r < 1e-12, name


@pytest.mark.parametrize("case", ["diag", "upper_upper", "lower_upper"])
@pytest.mark.parametrize("n", [1, 2, 4])
def test_transfer_commutes(model, sampler, case, n):
    p = model(n, case)
    u, v = sampler.points(2, p)
    assert algebra.transfer_commutator_residual(u, v, p, case) < 1e-10


def test_diag_transfer_conserves_spin(model, sampler):
    p = model(3, "diag")
    (u,) = sampler.points(1, p)
    t = build_transfer(u, p, "diag")
    assert np.linalg.norm(commutator(t, total_spin_z(3))) < 1e-10 * np.linalg.norm(t)


def test_lower_upper_transfer_on_vacuum(model, sampler):
    p = model(2, "lower_upper")
    (u,) = sampler.points(1, p)
    fx = ScalarFunctions(p)
    om = vacuum(2)
    expected = (fx.psi(u) + fx.psi(fx.cross(u))) * om + p.left.kappa * fn_c(Q * u) * (build_double_row(u, p).B @ om)
    got = build_transfer(u, p, "lower_upper") @ om
    assert np.linalg.norm(got - expected) < 1e-10 * np.linalg.norm(got)


def test_transfer_case_checks():
    p = ModelParams(BulkParams(Q, (1.1,)), LEFT, RIGHT)
    for case in ("diag", "upper_upper", "lower_upper"):
        with pytest.raises(ValueError):
            build_transfer(0.7, p, case)
    with pytest.raises(ValueError):
        build_transfer(0.7, p, "nope")


def test_hamiltonian_direct_examples():
    hp = map_boundary_params(LEFT, RIGHT, Q)
    h1 = build_hamiltonian_direct(1, 0.3, hp)
    expected = (hp.epsilon + hp.nu) * SIGMA_Z + (hp.kappa_minus + hp.tau_minus) * SIGMA_MINUS
    expected = expected + (hp.kappa_plus + hp.tau_plus) * SIGMA_PLUS
    assert np.allclose(h1, expected)
    zero = map_boundary_params(LeftBoundary(1, 1, 0, 0), RightBoundary(1, 1, 0, 0), Q)
    h2 = build_hamiltonian_direct(2, 1.0, zero)
    assert np.allclose(h2, [[1, 0, 0, 0], [0, -1, 2, 0], [0, 2, -1, 0], [0, 0, 0, 1]])


def test_hamiltonian_hermitian_for_real_fields():
    hp = map_boundary_params(LeftBoundary(0.8, 1.3, 0.2, 0.2), RightBoundary(1.1, 0.6, 0, 0), 2.0)
    h = build_hamiltonian_direct(3, 1.25, hp)
    assert np.allclose(h, h.conj().T)


def test_hamiltonian_shift():
    assert hamiltonian_shift(2, 2.0) == pytest.approx(2.95)


def test_boundary_map_examples():
    hp = map_boundary_params(LeftBoundary(0.7, 0.7, 0, 0), RIGHT, Q)
    assert hp.epsilon == 0
    assert hp.kappa_minus == 0 and hp.kappa_plus == 0
    with pytest.raises(ZeroDivisionError):
        map_boundary_params(LeftBoundary(1, -1, 0, 0), RIGHT, Q)


@pytest.mark.parametrize("n,case", [(1, "upper_upper"), (1, "lower_upper"), (3, "diag"), (2, "upper_upper"), (4, "lower_upper")])
def test_hamiltonian_from_transfer(model, n, case):
    p = model(n, case)
    diff = build_hamiltonian_from_transfer(p) - hamiltonian_for(p)
    assert np.max(np.abs(diff)) < 1e-7


def test_modified_operators_trivial_limits(model, sampler):
    p = model(2, "diag")
    (u,) = sampler.points(1, p)
    ops = build_double_row(u, p)
    up = build_modified_ops_upper(u, -2, p)
    lo = build_modified_ops_lower(u, 2, p)
    assert np.allclose(up.A, ops.A) and np.allclose(up.D, ops.D) and np.allclose(up.B, ops.B)
    assert np.allclose(lo.A, ops.A) and np.allclose(lo.D, ops.D)


@pytest.mark.parametrize("case", ["upper_upper", "lower_upper"])
def test_transfer_rewrite(model, sampler, case):
    p = model(3, case)
    (u,) = sampler.points(1, p)
    assert algebra.transfer_rewrite_residual(u, p, case) < 1e-10
    with pytest.raises(ValueError):
        algebra.transfer_rewrite_residual(u, p, "diag")


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("m", algebra.SHIFTS)
def test_shifted_relations(model, sampler, n, m):
    p = model(n, "upper_upper")
    u, v = sampler.points(2, p)
    for name, r in algebra.shifted_upper_residuals(u, v, m, p).items():
        assert r < 1e-10, name
    p = model(n, "lower_upper")
    u, v = sampler.points(2, p)
    for name, r in algebra.shifted_lower_residuals(u, v, m, p).items():
        assert r < 1e-10, name


@pytest.mark.parametrize("case", ["upper_upper", "lower_upper"])
def test_shifted_vacuum(model, sampler, case):
    p = model(2, case)
    (u,) = sampler.points(1, p)
    res = algebra.shifted_vacuum_residuals(u, -2, p)
    assert res
    assert max(res.values()) < 1e-10


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_diag_nilpotency(model, sampler, n):
    p = model(n, "diag")
    (u,) = sampler.points(1, p)
    assert algebra.covacuum_nilpotency_residual(u, p) < 1e-12
    # with tau != 0 B(u) no longer kills the all-down vector
    assert algebra.covacuum_nilpotency_residual(u, p.with_right(tau=0.5)) > 1e-3
