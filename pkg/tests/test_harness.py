import json
import math

import pytest

from bethe_segment.harness import (
    SUITES,
    CheckReport,
    ConfigError,
    RunConfig,
    emit_report,
    make_report,
    params_digest,
    run_solve,
    run_suite,
    run_suites,
    suite_ids,
    suite_rng,
)

MODULES = {"tensor-kernel", "vertex-model", "boundary-algebra", "bethe-functions", "state-builder", "harness-cli"}


def test_check_report_invariant():
    r = make_report("x", "d", [1e-12, 3e-11], 1e-10, 5)
    assert r.passed and r.samples == 2 and r.max_residual == 3e-11
    assert not make_report("x", "d", [2e-10], 1e-10, 0).passed
    assert not make_report("x", "d", [float("nan")], 1e-10, 0).passed
    with pytest.raises(ValueError):
        CheckReport("x", "d", 1, 1.0, 0.5, True, 0)


def test_report_field_order_and_round_trip():
    r = make_report("ybe:ybe", "abc", [1e-15], 1e-11, 7)
    doc = json.loads(emit_report([r], "json", timings=True))
    assert list(doc[0]) == ["check_id", "params_digest", "samples", "max_residual", "tolerance", "passed", "elapsed_ms"]
    assert CheckReport.from_dict(doc[0]) == r
    assert json.loads(emit_report([r], "json"))[0]["elapsed_ms"] == 0


def test_emit_report_empty_and_table():
    assert json.loads(emit_report([], "json")) == []
    table = emit_report([make_report("a:b", "d", [2.0], 1.0, 0)], "table")
    assert "FAIL" in table and "1 checks, 1 failed" in table
    with pytest.raises(ValueError):
        emit_report([], "xml")


def test_config_round_trip(default_config):
    text = default_config.to_json()
    back = RunConfig.from_json(text)
    assert back == default_config
    assert back.to_json() == text
    cfg = RunConfig(seed=4, n=3, case="lower_upper", q=1.3 + 0.2j, v=(1.1 + 0.1j, 0.8 - 0.2j, 1.3j),
                    kappa=0.4 - 0.1j, tolerances={"ybe": 1e-12}, suites=("ybe", "rll"))
    assert RunConfig.from_json(cfg.to_json()) == cfg


def test_config_documented_defaults():
    cfg = RunConfig()
    assert cfg.seed == 0 and cfg.n is None and cfg.case is None and cfg.starts == 64
    assert cfg.suites == ("all",)
    assert "not taken from" in RunConfig.default().note


@pytest.mark.parametrize(
    "patch,path",
    [
        ({"bogus": 1}, "config.bogus"),
        ({"q": [1.0]}, "config.q"),
        ({"v": [[1.0, 0.0], "x"]}, "config.v[1]"),
        ({"seed": -1}, "config.seed"),
        ({"n": 99}, "config.n"),
        ({"case": "sideways"}, "config.case"),
        ({"tolerances": {"ybe": 0}}, "config.tolerances.ybe"),
        ({"suites": "ybe"}, "config.suites"),
    ],
)
def test_config_errors_carry_path(default_config, patch, path):
    data = default_config.to_dict() | patch
    with pytest.raises(ConfigError) as err:
        RunConfig.from_dict(data)
    assert str(err.value).startswith(path)


def test_config_rejects_inadmissible_v(default_config):
    data = default_config.to_dict() | {"v": [[1.0, 0.0], [1.0, 0.0]]}
    with pytest.raises(ConfigError):
        RunConfig.from_dict(data)


def test_case_spelling(default_config):
    assert default_config.with_overrides(case="upper-upper").case == "upper_upper"
    p = default_config.model_params(2, "diag")
    assert p.left.kappa == 0 and p.left.kappa_tilde == 0 and p.right.tau == 0


def test_suite_coverage():
    ids = suite_ids()
    assert len(ids) == len(set(ids)) >= 30
    assert {SUITES[s].module for s in ids} == MODULES
    assert all(SUITES[s].description for s in ids)


def test_rng_split():
    a = suite_rng(0, "ybe").random()
    assert a == suite_rng(0, "ybe").random()
    assert a != suite_rng(0, "rll").random() and a != suite_rng(1, "ybe").random()


def test_digest_stable():
    assert params_digest({"a": 1, "b": [2]}) == params_digest({"b": [2], "a": 1})
    assert len(params_digest({})) == 16


def test_ybe_suite_seed7(default_config):
    reports = run_suite("ybe", default_config.with_overrides(seed=7))
    assert [r.samples for r in reports] == [100]
    assert all(r.passed for r in reports)


def test_conjecture_suite_n3(default_config):
    reports = run_suite("conjecture", default_config.with_overrides(n=3))
    assert reports and all(r.passed for r in reports)
    assert all(r.check_id.endswith("n3") for r in reports)


def test_hamiltonian_suite_n2(default_config):
    reports = run_suite("hamiltonian", default_config.with_overrides(n=2))
    assert len(reports) == 4 and all(r.passed for r in reports)


def test_size_filter_skips_out_of_range(default_config):
    assert run_suite("l12-interpolation", default_config.with_overrides(n=3)) == []


def test_determinism(default_config):
    cfg = default_config.with_overrides(seed=11)
    ids = ["kron-mixed-product", "izergin-symmetry", "eigenvalue-symmetry"]
    assert emit_report(run_suites(ids, cfg)) == emit_report(run_suites(ids, cfg))
    reports = run_suites(ids[::-1], cfg)
    suites = [r.check_id.split(":")[0] for r in reports]
    assert suites == sorted(suites)


def test_tolerance_override(default_config):
    cfg = default_config.with_overrides(tolerances={"ybe": 1e-30})
    (r,) = run_suite("ybe", cfg)
    assert r.tolerance == 1e-30 and not r.passed


def test_operator_tol_env(default_config, monkeypatch):
    monkeypatch.setenv("BETHE_SEGMENT_TOL", "1e-30")
    reports = run_suite("l-relations", default_config.with_overrides(n=2))
    assert all(r.tolerance == 1e-30 and not r.passed for r in reports)


def test_run_solve_lower_upper_n2(default_config):
    rep = run_solve(default_config, 2, "lower_upper")
    (sector,) = rep["sectors"]
    assert sector["m"] == 2 and sector["root_sets"]
    for rs in sector["root_sets"]:
        assert max(rs["bethe_residuals"]) < 1e-9
        assert all(m["distance"] < 1e-8 for m in rs["matches"])
        assert rs["eigenvector_residual"] < 1e-8
    assert rep["total_eigenvalues"] == 4
    assert len(rep["unmatched_eigenvalues"]) == 4 - rep["matched_eigenvalues"]
    h = rep["hamiltonian"]
    assert h["matched"] == len(h["energies"]) > 0
    assert all(math.isfinite(e["distance"]) and e["distance"] < 1e-8 for e in h["energies"])
    json.dumps(rep)
