"""Command-line entry point: verify, solve, spectrum, hamiltonian, list-suites."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .boundary import build_hamiltonian_from_transfer, build_transfer, hamiltonian_for
from .harness import SUITES, ConfigError, RunConfig, emit_report, run_solve, run_suites, suite_ids
from .tensor import spectrum

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
HAMILTONIAN_TOL = 1e-7
CASE_CHOICES = ("diag", "upper-upper", "lower-upper", "upper_upper", "lower_upper")


def _complex_arg(text: str) -> complex:
    try:
        re, im = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RE,IM, got {text!r}") from None
    return complex(re, im)


def _sorted_values(vals: np.ndarray) -> list[list[float]]:
    order = np.lexsort((vals.imag, vals.real))
    return [[float(vals[k].real), float(vals[k].imag)] for k in order]


def _load_config(args) -> RunConfig:
    base = RunConfig.load(args.config) if args.config else RunConfig.default()
    overrides = {k: getattr(args, k, None) for k in ("seed", "n", "case", "starts")}
    return base.with_overrides(**overrides)


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    ids = args.suite or list(cfg.suites)
    if "all" not in ids:
        known = set(suite_ids())
        unknown = [s for s in ids if s not in known]
        if unknown:
            raise ConfigError(f"--suite: unknown suite {unknown[0]!r} (see list-suites)")
    reports = run_suites(ids, cfg)
    sys.stdout.write(emit_report(reports, "json" if args.json else "table", timings=args.timings))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_solve(args) -> int:
    cfg = _load_config(args)
    report = run_solve(cfg, args.n, cfg.case, args.m, hamiltonian_check=not args.no_hamiltonian)
    if args.json:
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
        return EXIT_OK
    print(f"case {report['case']}, N = {report['n']}, {report['starts']} starts, seed {report['seed']}")
    for sector in report["sectors"]:
        print(f"M = {sector['m']}: {len(sector['root_sets'])} root sets, failures {sector['failures']}")
        for rs in sector["root_sets"]:
            roots = ", ".join(f"{complex(*r):.8g}" for r in rs["roots"]) or "-"
            dist = max(m["distance"] for m in rs["matches"])
            print(f"  [{roots}]  max|E| {rs['max_residual']:.2e}  match {dist:.2e}  eigvec {rs['eigenvector_residual']:.2e}")
    print(f"matched {report['matched_eigenvalues']} of {report['total_eigenvalues']} transfer eigenvalues")
    for ev in report["unmatched_eigenvalues"]:
        print(f"  unmatched {complex(*ev):.10g}")
    if "hamiltonian" in report:
        h = report["hamiltonian"]
        print(f"Hamiltonian: {h['matched']} of {len(h['energies'])} energies matched ({h['spectrum_size']} levels)")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    cfg = _load_config(args)
    p = cfg.model_params(args.n, cfg.case)
    vals = _sorted_values(spectrum(build_transfer(args.u, p, cfg.case)))
    if args.json:
        sys.stdout.write(json.dumps(vals) + "\n")
    else:
        for re, im in vals:
            print(f"{re: .12e} {im: .12e}")
    return EXIT_OK


def cmd_hamiltonian(args) -> int:
    cfg = _load_config(args)
    p = cfg.model_params(args.n, cfg.case).homogeneous()
    direct = hamiltonian_for(p)
    vals = _sorted_values(spectrum(direct))
    status = EXIT_OK
    out: dict = {"n": args.n, "spectrum": vals}
    if args.check:
        diff = float(np.max(np.abs(build_hamiltonian_from_transfer(p) - direct)))
        out["check"] = {"max_entry_difference": diff, "tolerance": HAMILTONIAN_TOL, "passed": diff < HAMILTONIAN_TOL}
        status = EXIT_OK if diff < HAMILTONIAN_TOL else EXIT_FAIL
    if args.json:
        sys.stdout.write(json.dumps(out, indent=2) + "\n")
    else:
        for re, im in vals:
            print(f"{re: .12e} {im: .12e}")
        if args.check:
            c = out["check"]
            print(f"transfer vs direct: max entry difference {c['max_entry_difference']:.3e} "
                  f"({'pass' if c['passed'] else 'FAIL'}, tolerance {HAMILTONIAN_TOL:.0e})")
    return status


def cmd_list_suites(args) -> int:
    ids = suite_ids()
    if args.json:
        rows = [{"suite_id": s, "module": SUITES[s].module, "description": SUITES[s].description} for s in ids]
        sys.stdout.write(json.dumps(rows, indent=2) + "\n")
    else:
        for s in ids:
            print(f"{s:<22} {SUITES[s].module:<17} {SUITES[s].description}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bethe-segment", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_required=False, case_required=False):
        p.add_argument("--config", help="JSON run configuration (default: the packaged one)")
        p.add_argument("--seed", type=int)
        p.add_argument("--n", type=int, required=n_required)
        p.add_argument("--case", choices=CASE_CHOICES, required=case_required)
        p.add_argument("--json", action="store_true", help="machine-readable output")

    v = sub.add_parser("verify", help="run property suites")
    common(v)
    v.add_argument("--suite", action="append", help="suite id or 'all' (repeatable)")
    v.add_argument("--timings", action="store_true", help="report elapsed_ms (breaks byte-stability)")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("solve", help="solve the Bethe equations and match exact eigenvalues")
    common(s, n_required=True, case_required=True)
    s.add_argument("--starts", type=int)
    s.add_argument("--m", type=int, help="a single sector (default: all)")
    s.add_argument("--no-hamiltonian", action="store_true", help="skip the Hamiltonian cross-check")
    s.set_defaults(func=cmd_solve)

    t = sub.add_parser("spectrum", help="eigenvalues of the transfer matrix t(u)")
    common(t, n_required=True, case_required=True)
    t.add_argument("--u", type=_complex_arg, required=True, metavar="RE,IM")
    t.set_defaults(func=cmd_spectrum)

    h = sub.add_parser("hamiltonian", help="spectrum of the open-chain Hamiltonian")
    common(h, n_required=True)
    h.add_argument("--check", action="store_true", help="compare with the transfer-matrix derivative")
    h.set_defaults(func=cmd_hamiltonian)

    ls = sub.add_parser("list-suites", help="enumerate suite ids")
    ls.add_argument("--json", action="store_true")
    ls.set_defaults(func=cmd_list_suites)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
