"""Operator entry point: deployment planning, scenario execution, theory
verification and multi-variant sweeps with machine-readable outputs.

Exit codes: 0 success, 2 usage error, 3 validation error (bad flags, bad
scenario file), 4 runtime failure. ``GRIDLOC_OUT_DIR`` sets the default
output directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

from .engine import Scenario, Trace, run_replicates, run_scenario
from .errors import GridlocError, ScenarioFormatError
from .geometry import (
    MIN_RANGE_RATIO,
    GridConfig,
    connectivity_graph,
    derive_timing,
    fine_cnt_limit_bound,
    grid_positions,
    min_ntl_range,
    monte_carlo_analytical_mae,
    region_area_fraction,
    theoretical_mae,
)
from .localization import EstimateMethod
from .metrics import (
    WITHIN_10M_INDEX,
    MetricsReport,
    compute_metrics,
    fgl_overhead,
    merge_reports,
)
from .scenario import SWEEP_LABELS, load_scenario, make_cg_scenario

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_RUNTIME = 4

REPORT_SCHEMA_VERSION = 1

TRACE_CSV_COLUMNS = (
    "time_s",
    "ntl_label",
    "actual_x_m",
    "actual_y_m",
    "est_x_m",
    "est_y_m",
    "method",
    "abs_error_m",
)


def _out_dir(arg: str | None) -> Path:
    base = arg or os.environ.get("GRIDLOC_OUT_DIR") or "."
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_trace_csv(trace: Trace, path: Path) -> None:
    """Write a trace in the stable row/column layout (byte-stable per run)."""
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_CSV_COLUMNS)
        for s in trace.samples:
            if s.estimate.method is EstimateMethod.NONE or s.estimate.pos is None:
                est_x = est_y = err = ""
            else:
                est_x = repr(s.estimate.pos.x)
                est_y = repr(s.estimate.pos.y)
                err = repr(math.hypot(s.estimate.pos.x - s.actual.x, s.estimate.pos.y - s.actual.y))
            writer.writerow(
                [
                    s.time_s,
                    s.label,
                    repr(s.actual.x),
                    repr(s.actual.y),
                    est_x,
                    est_y,
                    s.estimate.method.value,
                    err,
                ]
            )


def _report_dict(report: MetricsReport) -> dict:
    return {
        "n_samples": report.n_samples,
        "warmup_samples": report.warmup_samples,
        "cle_m": report.cle,
        "mae_m": report.mae,
        "rmse_m": report.rmse,
        "within_bound": {str(k): v for k, v in sorted(report.within_bound.items())},
        "fgl_count": report.fgl_count,
        "fgl_overhead_vs_baseline": report.fgl_overhead_vs_baseline,
    }


def _write_json(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cmd_plan(args: argparse.Namespace) -> int:
    if args.L <= 0 or args.S <= 0 or not (0 < args.G <= 1) or not (0 < args.T <= 1):
        print(
            "plan: L and S must be positive, G and T must lie in (0, 1]",
            file=sys.stderr,
        )
        return EXIT_VALIDATION

    raw_range = min_ntl_range(args.L)
    rounded_range = math.ceil(raw_range)
    plan = derive_timing(args.L, args.S, args.G, args.T)
    bound = fine_cnt_limit_bound(args.L / 2.0, plan.centroid_interval_P, args.S)
    mae = theoretical_mae(args.L, raw_range)
    area = region_area_fraction(args.L, raw_range)
    grid = GridConfig(rows=args.rows, cols=args.cols, cell_side_L=args.L)
    connectivity = connectivity_graph(grid_positions(grid), float(rounded_range))

    print(f"cell side L            : {args.L:.4f} m")
    print(f"min node range         : {raw_range:.4f} m (deploy at >= {rounded_range} m)")
    print(
        f"centroid interval      : raw {plan.raw_interval:.4f} s -> P = {plan.centroid_interval_P} s"
    )
    print(f"beacon interval        : p = {plan.beacon_interval_p} s (granularity {plan.granularity_G:g})")
    print(f"max beacons per window : {plan.max_beacons}")
    print(f"candidate threshold    : {plan.threshold_T:g} ({math.ceil(plan.threshold_T * plan.max_beacons - 1e-9)} of {plan.max_beacons})")
    print(f"fine count limit bound : <= {bound}")
    print(f"theoretical coarse MAE : {mae:.4f} m ({mae / args.L:.4f} L)")
    print(f"modelled area fraction : {area:.4f}")
    print(
        f"grid connectivity      : {args.rows}x{args.cols} at {rounded_range} m -> "
        f"{'connected' if connectivity.connected else 'DISCONNECTED'}"
    )

    if args.json_out:
        payload = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "cell_side_m": args.L,
            "min_range_raw_m": raw_range,
            "min_range_rounded_m": rounded_range,
            "raw_centroid_interval_s": plan.raw_interval,
            "centroid_interval_s": plan.centroid_interval_P,
            "beacon_interval_s": plan.beacon_interval_p,
            "granularity": plan.granularity_G,
            "max_beacons": plan.max_beacons,
            "threshold": plan.threshold_T,
            "fine_cnt_limit_bound": bound,
            "theoretical_mae_m": mae,
            "region_area_fraction": area,
            "connected": connectivity.connected,
        }
        _write_json(payload, Path(args.json_out))
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = replace(scenario, master_seed=args.seed)
    out = _out_dir(args.out)

    trace = run_scenario(scenario)
    write_trace_csv(trace, out / "trace.csv")

    reports = {sp.label: compute_metrics(trace, sp.label) for sp in scenario.profiles}
    payload = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "scenario": str(args.scenario),
        "master_seed": scenario.master_seed,
        "target_samples": scenario.target_samples,
        "reports": {label: _report_dict(rep) for label, rep in reports.items()},
    }
    _write_json(payload, out / "metrics.json")

    for label, rep in reports.items():
        print(
            f"{label:16s} mae {rep.mae:8.3f} m   rmse {rep.rmse:8.3f} m   "
            f"within10m {rep.within_bound[WITHIN_10M_INDEX]:6.3f}   fgl {rep.fgl_count}"
        )
    print(f"wrote {out / 'trace.csv'} and {out / 'metrics.json'}")
    return EXIT_OK


def cmd_verify_theory(args: argparse.Namespace) -> int:
    if args.samples < 100_000:
        print("verify-theory: need at least 1e5 samples", file=sys.stderr)
        return EXIT_VALIDATION
    if args.R is not None and len(args.L) != 1:
        print("verify-theory: --R only applies to a single --L value", file=sys.stderr)
        return EXIT_VALIDATION

    rows = []
    header = (
        f"{'L_m':>7} {'R_m':>9} {'theory_mae':>11} {'mc_mae':>9} {'mc_delta':>9} "
        f"{'sim_mae':>9} {'sim_delta':>10}"
    )
    print(header)
    for L in args.L:
        if L <= 0:
            print(f"verify-theory: cell side must be positive, got {L}", file=sys.stderr)
            return EXIT_VALIDATION
        R = args.R if args.R is not None else L * MIN_RANGE_RATIO
        theory = theoretical_mae(L, R)
        mc = monte_carlo_analytical_mae(L, R, args.samples, args.seed)
        scenario = make_cg_scenario(L, R, args.sim_samples, args.seed)
        trace = run_scenario(scenario)
        sim = compute_metrics(trace, "CG").mae
        row = {
            "cell_side_m": L,
            "range_m": R,
            "theory_mae_m": theory,
            "mc_mae_m": mc,
            "mc_delta": (mc - theory) / theory,
            "sim_mae_m": sim,
            "sim_delta": (sim - theory) / theory,
        }
        rows.append(row)
        print(
            f"{L:7.2f} {R:9.3f} {theory:11.4f} {mc:9.4f} {row['mc_delta']:9.4f} "
            f"{sim:9.4f} {row['sim_delta']:10.4f}"
        )

    if args.json_out:
        _write_json(
            {"schema_version": REPORT_SCHEMA_VERSION, "samples": args.samples, "rows": rows},
            Path(args.json_out),
        )
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = replace(scenario, master_seed=args.seed)

    labels = [sp.label for sp in scenario.profiles]
    for required in SWEEP_LABELS:
        if required not in labels:
            print(f"sweep: scenario is missing the {required!r} profile", file=sys.stderr)
            return EXIT_VALIDATION

    out = _out_dir(args.out)
    traces = run_replicates(scenario, args.replicates, workers=args.workers)

    per_replicate: list[dict[str, MetricsReport]] = [
        {label: compute_metrics(trace, label) for label in labels} for trace in traces
    ]
    pooled = {label: merge_reports([rep[label] for rep in per_replicate]) for label in labels}
    overhead = fgl_overhead(pooled["FG-Improved"], pooled["FG"])
    pooled["FG-Improved"] = replace(pooled["FG-Improved"], fgl_overhead_vs_baseline=overhead)

    with (out / "sweep.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["ntl_label", "mae_m", "rmse_m", "within_10m", "fgl_count", "fgl_overhead_vs_fg"]
        )
        for label in labels:
            rep = pooled[label]
            writer.writerow(
                [
                    label,
                    repr(rep.mae),
                    repr(rep.rmse),
                    repr(rep.within_bound[WITHIN_10M_INDEX]),
                    rep.fgl_count,
                    "" if rep.fgl_overhead_vs_baseline is None else repr(rep.fgl_overhead_vs_baseline),
                ]
            )

    payload = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "scenario": str(args.scenario),
        "master_seed": scenario.master_seed,
        "replicates": args.replicates,
        "aggregate": {label: _report_dict(pooled[label]) for label in labels},
        "per_replicate": [
            {label: _report_dict(rep[label]) for label in labels} for rep in per_replicate
        ],
    }
    _write_json(payload, out / "sweep.json")

    for label in labels:
        rep = pooled[label]
        extra = (
            f"   overhead vs FG {rep.fgl_overhead_vs_baseline:+.3f}"
            if rep.fgl_overhead_vs_baseline is not None
            else ""
        )
        print(
            f"{label:16s} mae {rep.mae:8.3f} m   rmse {rep.rmse:8.3f} m   "
            f"within10m {rep.within_bound[WITHIN_10M_INDEX]:6.3f}   fgl {rep.fgl_count}{extra}"
        )
    print(f"wrote {out / 'sweep.csv'} and {out / 'sweep.json'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridloc",
        description="Planning and simulation for graded-precision localization on a fixed grid.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="derive deployment parameters from the cell size")
    plan.add_argument("--L", type=float, required=True, help="grid cell side (m)")
    plan.add_argument("--S", type=float, default=1.0, help="top node speed (m/s)")
    plan.add_argument("--G", type=float, default=0.1, help="granularity target p/P")
    plan.add_argument("--T", type=float, default=0.9, help="candidate threshold (0, 1]")
    plan.add_argument("--rows", type=int, default=5)
    plan.add_argument("--cols", type=int, default=5)
    plan.add_argument("--json-out", default=None, help="also write the report as JSON")
    plan.set_defaults(func=cmd_plan)

    sim = sub.add_parser("simulate", help="run one scenario and emit trace + metrics")
    sim.add_argument("--scenario", required=True, help="scenario file path or 'paper-defaults'")
    sim.add_argument("--seed", type=int, default=None, help="override the scenario master seed")
    sim.add_argument("--out", default=None, help="output directory")
    sim.set_defaults(func=cmd_simulate)

    verify = sub.add_parser(
        "verify-theory", help="compare analytical, Monte Carlo and simulated coarse errors"
    )
    verify.add_argument("--L", type=float, nargs="+", required=True, help="cell side(s) (m)")
    verify.add_argument("--R", type=float, default=None, help="node range (default L*sqrt(5)/2)")
    verify.add_argument("--samples", type=int, default=1_000_000, help="Monte Carlo samples")
    verify.add_argument("--sim-samples", type=int, default=10_000, help="simulated seconds")
    verify.add_argument("--seed", type=int, default=42)
    verify.add_argument("--json-out", default=None)
    verify.set_defaults(func=cmd_verify_theory)

    sweep = sub.add_parser("sweep", help="replicate comparison of the five node variants")
    sweep.add_argument("--scenario", required=True, help="scenario file path or 'paper-defaults'")
    sweep.add_argument("--replicates", type=int, default=10)
    sweep.add_argument("--seed", type=int, default=None, help="override the scenario master seed")
    sweep.add_argument("--workers", type=int, default=1)
    sweep.add_argument("--out", default=None, help="output directory")
    sweep.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioFormatError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except GridlocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
