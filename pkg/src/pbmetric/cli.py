"""Command-line front end.

Subcommands: check-space, check-classes, check-hypotheses, solve,
coincidence, reproduce.  Exit codes are a stable contract for CI use:
0 success, 1 check/solve failure, 2 usage/parse/I-O error.

The machine-readable report (--report PATH) is deterministic JSON: keys
sorted, no timestamps or wall-clock fields, so identical invocations
produce byte-identical files.  Wall-clock timings go to the human summary
on stdout only.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .contraction import (
    GridSpec,
    Scenario,
    check_cyclic_admissible,
    check_range_inclusion,
    check_self_maps,
    check_sequential_closure,
    check_v0_gate,
    grid_axis_values,
    verify_tac_grid,
)
from .errors import PbmError, ScenarioError
from .function_classes import default_probe_sequences, check_cclass, check_omega1, check_xi
from .reports import AxiomReport, ComplianceReport
from .scenarios import (
    BUNDLED_NAMES,
    ScenarioFile,
    bundled_scenario_file,
    parse_scenario_text,
)
from .solver import (
    build_sequence,
    certify_common_fixed_point,
    check_weak_compatibility,
    detect_limit,
    find_coincidence_points,
    search_uniqueness,
)
from .spaces import check_b_metric_axioms, check_pbm_axioms, sample_carrier

import numpy as np

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

DEFAULT_GRID = "0:100:0.5"


# --- plumbing ---------------------------------------------------------------


class _Timer:
    def __init__(self):
        self.entries = []

    def time(self, label, fn, *args, **kwargs):
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        self.entries.append((label, time.perf_counter() - start))
        return result


def _resolve_scenario(spec: str) -> ScenarioFile:
    normalized = spec.strip().replace("_", "-")
    if normalized in BUNDLED_NAMES:
        return bundled_scenario_file(normalized)
    path = Path(spec)
    if not path.exists():
        raise ScenarioError(
            f"{spec!r} is neither a bundled scenario "
            f"({', '.join(BUNDLED_NAMES)}) nor an existing file"
        )
    return parse_scenario_text(path.read_text(encoding="utf-8"), path.stem)


def _grid_spec(args, sf: ScenarioFile) -> GridSpec:
    if args.grid:
        return GridSpec.parse(args.grid)
    if sf.verification.grid is not None:
        return sf.verification.grid
    return GridSpec.parse(DEFAULT_GRID)


def _axis_samples(scenario: Scenario, axis, seed: int, n_random: int = 16):
    lo, hi, step = axis
    n_grid = int(round((hi - lo) / step)) + 1
    return sample_carrier(
        scenario.space.carrier, lo, hi, n_grid, n_random, seed,
        extra=scenario.breakpoints(),
    )


def _thin(values, cap: int):
    if len(values) <= cap:
        return list(values)
    idx = np.linspace(0, len(values) - 1, cap).astype(int)
    return [values[i] for i in sorted(set(idx.tolist()))]


def _checks_pass(checks) -> bool:
    return all(c.passed for c in checks)


def _print_checks(checks):
    for c in checks:
        label = c.axiom_id if isinstance(c, AxiomReport) else c.check_id
        extra = ""
        if isinstance(c, ComplianceReport):
            extra = (f" satisfied={c.counts['satisfied']}"
                     f" vacuous={c.counts['vacuous']}"
                     f" violated={c.counts['violated']}")
            if c.verdict == "vacuous":
                extra += "  (all pairs vacuous)"
        print(f"  [{c.verdict.upper():>7}] {label}{extra}")
        for w in c.witnesses[:3]:
            print(f"            witness {tuple(w.points)}: "
                  f"lhs={w.lhs:.6g} rhs={w.rhs:.6g} {w.note}")


def _write_report(args, report: dict):
    if getattr(args, "report", None):
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
        Path(args.report).write_text(text, encoding="utf-8")


def _base_report(args, command: str, scenario_name: str) -> dict:
    return {
        "tool": "pbmetric",
        "version": __version__,
        "command": command,
        "scenario": scenario_name,
        "config": {
            "grid": args.grid,
            "tol": args.tol,
            "max_iters": args.max_iters,
            "seed": args.seed,
            "workers": args.workers,
        },
    }


# --- pipeline pieces -------------------------------------------------------------


def _space_checks(sf: ScenarioFile, scenario: Scenario, args, grid, timer,
                  with_b_metric=False):
    samples = _axis_samples(scenario, grid.w_axis, args.seed)
    checks = list(timer.time(
        "pbm-axioms", check_pbm_axioms, scenario.space, samples, args.tol))
    if with_b_metric:
        checks += timer.time(
            "b-metric-axioms", check_b_metric_axioms, scenario.space, samples,
            args.tol)
    checks.append(timer.time(
        "self-maps", check_self_maps, scenario, _thin(samples, 128), args.tol))
    return checks


def _class_checks(scenario: Scenario, args, grid, timer):
    hi = max(abs(grid.w_axis[1]), abs(grid.z_axis[1]), 1.0)
    xi_samples = sorted({0.0} | {float(v) for v in np.linspace(0.0, hi, 129)})
    pair_axis = [float(v) for v in np.linspace(0.0, hi, 17)]
    pairs = [(t, z) for t in pair_axis for z in pair_axis]
    return [
        timer.time("xi-class", check_xi, scenario.xi, xi_samples, args.tol),
        timer.time("omega-class", check_omega1, scenario.omega,
                   default_probe_sequences(args.tol), args.tol),
        timer.time("cclass", check_cclass, scenario.cclass, pairs, args.tol),
    ]


def _hypothesis_checks(sf: ScenarioFile, scenario: Scenario, args, grid, timer,
                       adm_samples=None):
    samples = adm_samples or _axis_samples(scenario, grid.w_axis, args.seed)
    checks = [
        timer.time("cyclic-admissibility", check_cyclic_admissible,
                   scenario, samples, args.tol),
        timer.time("range-inclusion", check_range_inclusion,
                   scenario, _thin(samples, 96), args.tol),
        timer.time("sequential-closure", check_sequential_closure,
                   scenario, _thin(samples, 96), args.tol),
        timer.time("v0-gate", check_v0_gate, scenario, sf.solver.v0),
        timer.time("tac-grid", verify_tac_grid, scenario, grid, args.tol,
                   args.workers),
    ]
    return checks


def _solve_pipeline(sf: ScenarioFile, scenario: Scenario, args, grid, timer):
    v0_list = args.v0 if getattr(args, "v0", None) else sf.solver.v0
    tol = args.tol
    traces = []
    limits = []
    for v0 in v0_list:
        trace = timer.time(f"iterate v0={v0:g}", build_sequence, scenario,
                           v0, args.max_iters, tol)
        entry = trace.summary()
        if trace.converged:
            certificate = detect_limit(trace, scenario.space, tol)
            entry["limit_certificate"] = certificate.to_dict()
            limits.append(trace.limit)
        traces.append(entry)

    lo, hi, _ = grid.w_axis
    search_grid = [float(v)
                   for v in np.linspace(lo, hi, int(round((hi - lo) / 0.25)) + 1)
                   if scenario.space.contains(float(v))]
    p_hq = timer.time("coincidence (h,Q)", find_coincidence_points,
                      scenario.space, scenario.map_h, scenario.map_Q,
                      search_grid, tol, "(h,Q)")
    p_ez = timer.time("coincidence (eta,Z)", find_coincidence_points,
                      scenario.space, scenario.map_eta, scenario.map_Z,
                      search_grid, tol, "(eta,Z)")
    weak = [
        check_weak_compatibility(scenario.space, scenario.map_h,
                                 scenario.map_Q, p_hq.points, tol, "(h,Q)"),
        check_weak_compatibility(scenario.space, scenario.map_eta,
                                 scenario.map_Z, p_ez.points, tol, "(eta,Z)"),
    ]
    uniqueness = timer.time("uniqueness", search_uniqueness, scenario,
                            search_grid, tol)

    certified = []
    for d in sorted(set(limits)):
        cert = certify_common_fixed_point(scenario, d, tol)
        if cert.certified:
            certified.append(cert)

    solver_report = {
        "v0_list": [float(v) for v in v0_list],
        "traces": traces,
        "coincidence": [p_hq.to_dict(), p_ez.to_dict()],
        "uniqueness": uniqueness.to_dict(),
        "certified_fixed_points": [c.to_dict() for c in certified],
    }
    return solver_report, weak, certified, (p_hq, p_ez), uniqueness


# --- commands -----------------------------------------------------------------


def cmd_check_space(args) -> int:
    sf = _resolve_scenario(args.scenario)
    scenario = sf.build()
    grid = _grid_spec(args, sf)
    timer = _Timer()
    checks = _space_checks(sf, scenario, args, grid, timer,
                           with_b_metric=args.b_metric)
    print(f"pbmetric {__version__} — check-space on {sf.name}")
    _print_checks(checks)
    _print_timings(timer)
    report = _base_report(args, "check-space", sf.name)
    report["checks"] = [c.to_dict() for c in checks]
    _write_report(args, report)
    return EXIT_OK if _checks_pass(checks) else EXIT_CHECK_FAILED


def cmd_check_classes(args) -> int:
    sf = _resolve_scenario(args.scenario)
    scenario = sf.build()
    grid = _grid_spec(args, sf)
    timer = _Timer()
    checks = _class_checks(scenario, args, grid, timer)
    print(f"pbmetric {__version__} — check-classes on {sf.name}")
    _print_checks(checks)
    _print_timings(timer)
    report = _base_report(args, "check-classes", sf.name)
    report["checks"] = [c.to_dict() for c in checks]
    _write_report(args, report)
    return EXIT_OK if _checks_pass(checks) else EXIT_CHECK_FAILED


def cmd_check_hypotheses(args) -> int:
    sf = _resolve_scenario(args.scenario)
    scenario = sf.build()
    grid = _grid_spec(args, sf)
    timer = _Timer()
    checks = _class_checks(scenario, args, grid, timer)
    checks += _hypothesis_checks(sf, scenario, args, grid, timer)
    print(f"pbmetric {__version__} — check-hypotheses on {sf.name}")
    _print_checks(checks)
    _print_timings(timer)
    report = _base_report(args, "check-hypotheses", sf.name)
    report["checks"] = [c.to_dict() for c in checks]
    _write_report(args, report)
    return EXIT_OK if _checks_pass(checks) else EXIT_CHECK_FAILED


def cmd_solve(args) -> int:
    sf = _resolve_scenario(args.scenario)
    scenario = sf.build()
    grid = _grid_spec(args, sf)
    timer = _Timer()
    solver_report, weak, certified, pairs, uniqueness = _solve_pipeline(
        sf, scenario, args, grid, timer)
    print(f"pbmetric {__version__} — solve on {sf.name}")
    if not scenario.declared_closed_ranges:
        print("  note: no range is declared closed; the iteration limit is "
              "certified directly")
    for entry in solver_report["traces"]:
        print(f"  v0={entry['v0']:g}: {entry['status']} after "
              f"{entry['iterations']} points, limit={entry['limit']}")
    _print_checks(weak)
    for cert in certified:
        print(f"  certified common fixed point {cert.point:g} "
              f"(residuals {max(cert.residuals.values()):.3g})")
    if uniqueness.warning:
        print(f"  warning: {uniqueness.warning}")
    _print_timings(timer)
    report = _base_report(args, "solve", sf.name)
    report["checks"] = [c.to_dict() for c in weak]
    report["solver"] = solver_report
    _write_report(args, report)
    return EXIT_OK if certified else EXIT_CHECK_FAILED


def cmd_coincidence(args) -> int:
    sf = _resolve_scenario(args.scenario)
    scenario = sf.build()
    grid = _grid_spec(args, sf)
    timer = _Timer()
    lo, hi, step = grid.w_axis
    search_grid = [float(v)
                   for v in np.linspace(lo, hi, int(round((hi - lo) / step)) + 1)
                   if scenario.space.contains(float(v))]
    p_hq = timer.time("coincidence (h,Q)", find_coincidence_points,
                      scenario.space, scenario.map_h, scenario.map_Q,
                      search_grid, args.tol, "(h,Q)")
    p_ez = timer.time("coincidence (eta,Z)", find_coincidence_points,
                      scenario.space, scenario.map_eta, scenario.map_Z,
                      search_grid, args.tol, "(eta,Z)")
    weak = [
        check_weak_compatibility(scenario.space, scenario.map_h,
                                 scenario.map_Q, p_hq.points, args.tol, "(h,Q)"),
        check_weak_compatibility(scenario.space, scenario.map_eta,
                                 scenario.map_Z, p_ez.points, args.tol,
                                 "(eta,Z)"),
    ]
    print(f"pbmetric {__version__} — coincidence on {sf.name}")
    print(f"  P(h,Q)   = {p_hq.points}")
    print(f"  P(eta,Z) = {p_ez.points}")
    _print_checks(weak)
    _print_timings(timer)
    report = _base_report(args, "coincidence", sf.name)
    report["checks"] = [c.to_dict() for c in weak]
    report["coincidence"] = [p_hq.to_dict(), p_ez.to_dict()]
    _write_report(args, report)
    both = bool(p_hq.points) and bool(p_ez.points)
    return EXIT_OK if both and _checks_pass(weak) else EXIT_CHECK_FAILED


def cmd_reproduce(args) -> int:
    name = args.name.strip().replace("_", "-")
    if name not in BUNDLED_NAMES:
        print(f"error: unknown bundled scenario {args.name!r}; "
              f"available: {', '.join(BUNDLED_NAMES)}", file=sys.stderr)
        return EXIT_USAGE
    sf = bundled_scenario_file(name)
    scenario = sf.build()
    grid = _grid_spec(args, sf)
    timer = _Timer()
    conclusions = {}

    checks = _space_checks(sf, scenario, args, grid, timer)
    conclusions["space_axioms_pass"] = _checks_pass(checks)
    class_checks = _class_checks(scenario, args, grid, timer)
    checks += class_checks
    conclusions["function_classes_pass"] = _checks_pass(class_checks)

    adm_samples = sample_carrier(
        scenario.space.carrier, grid.w_axis[0], grid.w_axis[1],
        968, 32, args.seed, extra=scenario.breakpoints())
    hyp = [timer.time("cyclic-admissibility", check_cyclic_admissible,
                      scenario, adm_samples, args.tol)]
    tac = timer.time("tac-grid", verify_tac_grid, scenario, grid, args.tol,
                     args.workers)
    hyp.append(tac)
    conclusions["cyclic_admissible"] = hyp[0].passed
    conclusions["tac_contraction_holds"] = (
        tac.verdict == "pass" and tac.counts["satisfied"] > 0
    )

    report = _base_report(args, "reproduce", sf.name)
    solver_report = None

    if name != "example-2-2":
        # the z^6-branch scenario is bundled for the contraction check only
        hyp += [
            timer.time("range-inclusion", check_range_inclusion, scenario,
                       _thin(adm_samples, 96), args.tol),
            timer.time("sequential-closure", check_sequential_closure,
                       scenario, _thin(adm_samples, 96), args.tol),
            timer.time("v0-gate", check_v0_gate, scenario, sf.solver.v0),
        ]
        conclusions["hypotheses_pass"] = _checks_pass(hyp)
        solver_report, weak, certified, (p_hq, p_ez), uniqueness = \
            _solve_pipeline(sf, scenario, args, grid, timer)
        checks += weak
        conclusions["all_starts_converge"] = all(
            t["status"] == "converged" for t in solver_report["traces"])
        conclusions["weak_compatibility_pass"] = _checks_pass(weak)
        conclusions["common_fixed_point_zero"] = any(
            abs(c.point) <= 1e-6 for c in certified)
        conclusions["unique_on_grid"] = (
            len(uniqueness.points) == 1 and not uniqueness.multiple)
    checks += hyp

    confirmed = all(conclusions.values())
    print(f"pbmetric {__version__} — reproduce {sf.name}")
    _print_checks(checks)
    for key, value in conclusions.items():
        print(f"  {'confirmed' if value else 'NOT CONFIRMED'}: {key}")
    _print_timings(timer)

    report["checks"] = [c.to_dict() for c in checks]
    if solver_report is not None:
        report["solver"] = solver_report
    report["conclusions"] = conclusions
    _write_report(args, report)
    return EXIT_OK if confirmed else EXIT_CHECK_FAILED


def _print_timings(timer: _Timer):
    total = sum(dt for _, dt in timer.entries)
    slow = [(label, dt) for label, dt in timer.entries if dt >= 0.05]
    parts = ", ".join(f"{label} {dt:.2f}s" for label, dt in slow[:6])
    print(f"  elapsed: {total:.2f}s" + (f" ({parts})" if parts else ""))


# --- argument parsing -------------------------------------------------------------


def _float_list(text: str):
    return tuple(float(p) for p in text.split(",") if p.strip())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="bundled scenario name or file path")
    common.add_argument("--grid", help="grid spec lo:hi:step[,lo:hi:step]")
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--max-iters", type=int, default=10000, dest="max_iters")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--report", help="write a JSON report to this path")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1)

    parser = argparse.ArgumentParser(
        prog="pbmetric",
        description="Verify partial b-metric contraction scenarios and "
                    "compute certified common fixed points.",
    )
    parser.add_argument("--version", action="version",
                        version=f"pbmetric {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-space", parents=[common],
                       help="check the distance axioms on a sampled carrier")
    p.add_argument("--b-metric", action="store_true", dest="b_metric",
                   help="also run the plain b-metric axioms")
    p.set_defaults(handler=cmd_check_space)

    p = sub.add_parser("check-classes", parents=[common],
                       help="check the toolkit function classes")
    p.set_defaults(handler=cmd_check_classes)

    p = sub.add_parser("check-hypotheses", parents=[common],
                       help="check every contraction hypothesis")
    p.set_defaults(handler=cmd_check_hypotheses)

    p = sub.add_parser("solve", parents=[common],
                       help="run the interleaved iteration and certify "
                            "common fixed points")
    p.add_argument("--v0", type=_float_list,
                   help="comma-separated starting points")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("coincidence", parents=[common],
                       help="find coincidence points of both pairs")
    p.set_defaults(handler=cmd_coincidence)

    p = sub.add_parser("reproduce", parents=[common],
                       help="run a bundled scenario end to end and confirm "
                            "its documented conclusions")
    p.add_argument("name", help=f"one of: {', '.join(BUNDLED_NAMES)}")
    p.set_defaults(handler=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command != "reproduce" and not args.scenario:
        parser.error(f"{args.command} requires --scenario")
    try:
        return args.handler(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PbmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
