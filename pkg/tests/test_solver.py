import numpy as np
import pytest

from bethe_segment import solver
from bethe_segment.bethe import bethe_residuals, canonicalize, lambda_total
from bethe_segment.boundary import build_transfer
from bethe_segment.solver import newton, solve_bethe, solve_sectors
from bethe_segment.states import build_bethe_vector
from bethe_segment.tensor import spectrum

PROBE = 0.9 + 0.3j


def _match(lam, t):
    ev = spectrum(t)
    return float(np.min(np.abs(ev - lam)) / max(1.0, np.max(np.abs(ev))))


@pytest.fixture(scope="module")
def lu1(default_config):
    p = default_config.model_params(1, "lower_upper")
    return p, solve_bethe("lower_upper", 1, p)


def test_lower_upper_n1(lu1):
    p, res = lu1
    assert len(res.root_sets) == 2
    t = build_transfer(PROBE, p, "lower_upper")
    for rs, nres in zip(res.root_sets, res.residuals):
        assert nres < 1e-9
        assert np.max(np.abs(bethe_residuals(rs.roots, p, "lower_upper"))) < 1e-9
        assert _match(lambda_total(PROBE, rs.roots, p), t) < 1e-8
        phi = build_bethe_vector(rs.roots, p, "lower_upper").state
        lam = lambda_total(PROBE, rs.roots, p)
        assert np.linalg.norm(t @ phi - lam * phi) / np.linalg.norm(phi) < 1e-8


def test_diag_n2_single_root(default_config):
    p = default_config.model_params(2, "diag")
    res = solve_bethe("diag", 1, p)
    assert res.root_sets
    t = build_transfer(PROBE, p, "diag")
    hits = {int(np.argmin(np.abs(spectrum(t) - lambda_total(PROBE, rs.roots, p, "diag")))) for rs in res.root_sets}
    for rs in res.root_sets:
        assert _match(lambda_total(PROBE, rs.roots, p, "diag"), t) < 1e-8
    assert len(hits) == len(res.root_sets)


def test_crossing_images_deduplicate(lu1):
    p, res = lu1
    rs = res.root_sets[0]
    image = [1 / (p.q * u) for u in rs.roots]
    roots, norm = newton(np.array(image) * (1 + 1e-4), p, "lower_upper")
    assert norm < 1e-9
    assert canonicalize(roots, p.q, "lower_upper") == rs or np.allclose(
        canonicalize(roots, p.q, "lower_upper").roots, rs.roots, atol=1e-8
    )
    keys = [solver._key(r) for r in res.root_sets]
    assert len(keys) == len(set(keys))


def test_residual_forms_share_roots(lu1):
    p, res = lu1
    z = np.log(np.array(res.root_sets[0].roots))
    for fn in solver.RESIDUAL_FORMS.values():
        assert np.max(np.abs(fn(z, p, "lower_upper"))) < 1e-8


def test_sectors_and_argument_checks(default_config):
    p = default_config.model_params(2, "diag")
    assert solve_bethe("diag", 0, p).root_sets[0].roots == ()
    with pytest.raises(ValueError):
        solve_bethe("nope", 1, p)
    with pytest.raises(ValueError):
        solve_bethe("diag", 3, p)
    with pytest.raises(ValueError):
        solve_bethe("lower_upper", 1, default_config.model_params(2, "lower_upper"))
    sweep = solve_sectors("diag", p, n_starts=24)
    assert sorted(sweep) == [0, 1, 2]


def test_deterministic(default_config):
    p = default_config.model_params(2, "upper_upper")
    a = solve_bethe("upper_upper", 1, p, 24, seed=3)
    b = solve_bethe("upper_upper", 1, p, 24, seed=3)
    assert a.root_sets == b.root_sets and a.failures == b.failures


def test_admissibility_rejects_trivial_roots(default_config):
    p = default_config.model_params(2, "diag")
    assert not solver._admissible(np.array([1.0 + 0j, 0.7 + 0.9j]), p)
    assert not solver._admissible(np.array([1j, 0.7 + 0.9j]), p)
    assert not solver._admissible(np.array([0.7 + 0.9j, 0.7 + 0.9j]), p)
    assert solver._admissible(np.array([0.7 + 0.9j, 1.4 - 0.3j]), p)


def test_starting_points_shape(default_config):
    p = default_config.model_params(3, "diag")
    rng = np.random.default_rng(0)
    starts = solver.starting_points(2, 9, rng, p, None)
    assert len(starts) == 9 and all(s.shape == (2,) for s in starts)
