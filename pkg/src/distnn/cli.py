"""Command-line interface: impute, tune, bands, simulate, and verify.

Every output file embeds the fully resolved configuration including the
seed, and timestamps are never written, so re-running a command with the
recorded configuration reproduces its output byte for byte.

Exit codes: 0 success, 1 parse error or bad target, 2 no neighbors found
(unless --fallback-nearest is set).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from .empirical import EmpiricalDistribution, StepQuantile
from .errors import (
    AllTrialsFailedError,
    DistnnError,
    NoNeighborsError,
    NoObservedCellsError,
    PanelParseError,
)
from .estimator import impute
from .experiments import (
    ExperimentSpec,
    run_scaling,
    verify_uniform_barycenter_error,
    verify_barycenter_rate,
)
from .inference import asymptotic_band, bootstrap_band, default_levels, SigmaFunction
from .panel import load_panel
from .synthetic import DgpSpec
from .tuning import TuneConfig, tune_eta

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_NO_NEIGHBORS = 2


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _write_csv(path, rows, fieldnames) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _estimate_payload(estimate) -> dict:
    if isinstance(estimate, EmpiricalDistribution):
        return {"kind": "samples", "samples": [float(v) for v in estimate.samples]}
    if isinstance(estimate, StepQuantile):
        return {
            "kind": "quantile_grid",
            "levels": [float(v) for v in estimate.edges],
            "values": [float(v) for v in estimate.values],
        }
    raise TypeError(f"unknown estimate type: {type(estimate)!r}")


def _result_payload(panel, result) -> dict:
    ns = result.neighbors
    return {
        "row": panel.row_keys[ns.target_row],
        "col": panel.col_keys[ns.target_col],
        "eta": ns.eta,
        "neighbors": {
            "rows": [panel.row_keys[u] for u in ns.rows],
            "distances": [float(d) for d in ns.distances],
            "overlap_counts": [int(c) for c in ns.overlap_counts],
        },
        "estimate": _estimate_payload(result.estimate),
        "summaries": result.summaries,
    }


def _resolve_target(panel, args):
    cell = panel.cell_index(args.row, args.col)
    if cell is None:
        print(f"error: target ({args.row}, {args.col}) not found in panel axes",
              file=sys.stderr)
        return None
    return cell


def _resolve_eta(panel, cell, args):
    if args.eta is not None:
        return float(args.eta)
    cfg = TuneConfig(
        budget=args.budget,
        seed=args.seed,
        min_overlap=getattr(args, "min_overlap", 1),
    )
    return tune_eta(panel.matrix, cell[0], cell[1], cfg).best_eta


def _cmd_impute(args) -> int:
    panel = load_panel(args.input)
    config = {
        "command": "impute",
        "input": str(args.input),
        "eta": args.eta,
        "tune": bool(args.tune),
        "budget": args.budget,
        "var_alpha": args.var_alpha,
        "min_overlap": args.min_overlap,
        "fallback_nearest": bool(args.fallback_nearest),
        "all_missing": bool(args.all_missing),
        "target": None if args.all_missing else [args.row, args.col],
        "seed": args.seed,
    }

    def impute_cell(cell, eta):
        try:
            return impute(panel.matrix, cell[0], cell[1], eta,
                          args.var_alpha, args.min_overlap), None
        except NoNeighborsError as exc:
            if args.fallback_nearest:
                try:
                    return impute(panel.matrix, cell[0], cell[1], math.inf,
                                  args.var_alpha, args.min_overlap,
                                  max_neighbors=1), None
                except NoNeighborsError as exc2:
                    return None, exc2
            return None, exc

    if args.all_missing:
        results, failures = [], []
        for cell in panel.matrix.missing_cells():
            try:
                eta = _resolve_eta(panel, cell, args)
            except (NoObservedCellsError, AllTrialsFailedError) as exc:
                failures.append({"row": panel.row_keys[cell[0]],
                                 "col": panel.col_keys[cell[1]],
                                 "error": str(exc)})
                continue
            result, failure = impute_cell(cell, eta)
            if result is not None:
                results.append(_result_payload(panel, result))
            else:
                failures.append({"row": panel.row_keys[cell[0]],
                                 "col": panel.col_keys[cell[1]],
                                 "error": str(failure)})
        _write_json(args.output, {"config": config, "results": results,
                                  "failures": failures})
        return EXIT_OK

    cell = _resolve_target(panel, args)
    if cell is None:
        return EXIT_BAD_INPUT
    eta = _resolve_eta(panel, cell, args)
    result, failure = impute_cell(cell, eta)
    if result is None:
        _write_json(args.output, {"config": config,
                                  "error": "no_neighbors",
                                  "message": str(failure)})
        print(f"error: {failure}", file=sys.stderr)
        return EXIT_NO_NEIGHBORS
    _write_json(args.output, {"config": config,
                              "result": _result_payload(panel, result)})
    return EXIT_OK


def _cmd_tune(args) -> int:
    panel = load_panel(args.input)
    cell = _resolve_target(panel, args)
    if cell is None:
        return EXIT_BAD_INPUT
    cfg = TuneConfig(
        budget=args.budget,
        search=args.search,
        eta_min=args.eta_min,
        eta_max=args.eta_max,
        seed=args.seed,
        min_overlap=args.min_overlap,
    )
    report = tune_eta(panel.matrix, cell[0], cell[1], cfg)
    payload = {
        "config": {
            "command": "tune", "input": str(args.input),
            "target": [args.row, args.col], "budget": cfg.budget,
            "search": cfg.search, "eta_min": cfg.eta_min,
            "eta_max": cfg.eta_max, "min_overlap": cfg.min_overlap,
            "seed": cfg.seed,
        },
        "best_eta": report.best_eta,
        "trials": [
            {"eta": t.eta, "mean_loss": t.mean_loss,
             "n_valid_cells": t.n_valid_cells,
             "n_no_neighbor_cells": t.n_no_neighbor_cells}
            for t in report.trials
        ],
    }
    _write_json(args.output, payload)
    return EXIT_OK


def _cmd_bands(args) -> int:
    panel = load_panel(args.input)
    cell = _resolve_target(panel, args)
    if cell is None:
        return EXIT_BAD_INPUT
    eta = _resolve_eta(panel, cell, args)
    levels = default_levels(args.levels)
    config = {
        "command": "bands", "input": str(args.input),
        "target": [args.row, args.col], "eta": eta,
        "alpha": args.alpha, "levels": args.levels,
        "simultaneous": bool(args.simultaneous), "method": args.method,
        "reps_samples": args.reps_samples,
        "reps_neighbors": args.reps_neighbors, "seed": args.seed,
    }
    try:
        if args.method == "bootstrap":
            band = bootstrap_band(
                panel.matrix, cell[0], cell[1], eta, args.alpha, levels,
                reps_samples=args.reps_samples,
                reps_neighbors=args.reps_neighbors,
                seed=args.seed, simultaneous=args.simultaneous,
            )
        else:
            result = impute(panel.matrix, cell[0], cell[1], eta)
            sigma = SigmaFunction.from_result(panel.matrix, result)
            n_j = min(
                panel.matrix.entry(u, cell[1]).n for u in result.neighbors.rows
            )
            band = asymptotic_band(result, sigma, n_j, args.alpha, levels,
                                   args.simultaneous)
    except NoNeighborsError as exc:
        _write_json(args.output, {"config": config, "error": "no_neighbors",
                                  "message": str(exc)})
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_NEIGHBORS
    _write_json(args.output, {
        "config": config,
        "band": {
            "levels": [float(v) for v in band.levels],
            "lower": [float(v) for v in band.lower],
            "upper": [float(v) for v in band.upper],
            "alpha": band.alpha,
            "method": band.method,
            "simultaneous": band.simultaneous,
        },
    })
    return EXIT_OK


def _cmd_simulate(args) -> int:
    dgp = DgpSpec(
        kind=args.kind,
        base_family=args.base,
        n_per_entry=args.n,
        location_range=(-5.0, 5.0),
        scale_range=(1.0, 5.0),
    )
    spec = ExperimentSpec(
        dgp=dgp,
        sweep=args.sweep,
        values=tuple(args.values),
        trials=args.trials,
        n_rows=args.rows,
        n_cols=args.cols,
        eta_policy="fixed" if args.eta is not None else "tuned",
        eta=args.eta,
        tune_budget=args.budget,
        min_neighbors=args.min_neighbors,
        seed=args.seed,
    )
    result = run_scaling(spec)
    config = {
        "command": "simulate", "kind": args.kind, "base": args.base,
        "sweep": args.sweep, "values": list(args.values),
        "trials": args.trials, "rows": args.rows, "cols": args.cols,
        "n": args.n, "eta": args.eta, "budget": args.budget,
        "min_neighbors": args.min_neighbors, "seed": args.seed,
    }
    rows = result.csv_rows()
    _write_csv(f"{args.output_prefix}.csv", rows, list(rows[0].keys()))
    _write_json(f"{args.output_prefix}.json",
                {"config": config, "summary": result.summary()})
    print(f"fitted exponent: {result.fit.exponent:.4f}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    if args.subject == "uniform-barycenter":
        rows = verify_uniform_barycenter_error(trials=args.trials, seed=args.seed)
        table = [
            {"m": r.m, "n": r.n, "simulated_mean": r.simulated_mean,
             "closed_form": r.closed_form, "z_score": r.z_score,
             "trials": r.trials}
            for r in rows
        ]
        _write_csv(f"{args.output_prefix}.csv", table, list(table[0].keys()))
        _write_json(f"{args.output_prefix}.json", {
            "config": {"command": "verify", "subject": args.subject,
                       "trials": args.trials, "seed": args.seed},
            "rows": table,
            "max_abs_z": max(abs(r.z_score) for r in rows),
        })
        for r in rows:
            print(f"m={r.m:3d} n={r.n:4d} simulated={r.simulated_mean:.6g} "
                  f"closed={r.closed_form:.6g} z={r.z_score:+.2f}")
        return EXIT_OK
    result = verify_barycenter_rate(seed=args.seed)
    _write_json(f"{args.output_prefix}.json", {
        "config": {"command": "verify", "subject": args.subject,
                   "seed": args.seed},
        "summary": result.summary(),
    })
    for k, err in zip(result.k_list, result.k_errors):
        print(f"k={k:3d} mean_error={err:.6g}")
    print(f"doubling ratios: {[round(float(r), 4) for r in result.doubling_ratios]}")
    print(f"slope in n: {result.slope_fit.exponent:.4f}")
    return EXIT_OK


def _add_target_args(parser, required=True):
    parser.add_argument("--row", required=required, help="target row key")
    parser.add_argument("--col", required=required, help="target column key")


def _add_eta_args(parser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--eta", type=float, default=None,
                       help="fixed distance threshold")
    group.add_argument("--tune", action="store_true",
                       help="select eta by leave-one-out validation (default)")
    parser.add_argument("--budget", type=int, default=50,
                        help="tuning candidate budget")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distnn",
        description="Distributional matrix completion with Wasserstein "
                    "nearest neighbors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("impute", help="impute one target cell or all missing cells")
    p.add_argument("--input", required=True, help="panel CSV or matrix JSON")
    _add_target_args(p, required=False)
    p.add_argument("--all-missing", action="store_true",
                   help="impute every missing cell")
    _add_eta_args(p)
    p.add_argument("--var-alpha", type=float, default=0.05)
    p.add_argument("--min-overlap", type=int, default=1)
    p.add_argument("--fallback-nearest", action="store_true",
                   help="fall back to the single nearest row when no "
                        "neighbor passes the threshold")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default="impute_result.json")
    p.set_defaults(func=_cmd_impute)

    p = sub.add_parser("tune", help="select the eta threshold for a target cell")
    p.add_argument("--input", required=True)
    _add_target_args(p)
    p.add_argument("--budget", type=int, default=50)
    p.add_argument("--search", choices=["log_grid", "random_log_uniform"],
                   default="log_grid")
    p.add_argument("--eta-min", type=float, default=None)
    p.add_argument("--eta-max", type=float, default=None)
    p.add_argument("--min-overlap", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default="tune_result.json")
    p.set_defaults(func=_cmd_tune)

    p = sub.add_parser("bands", help="confidence bands for an imputed quantile function")
    p.add_argument("--input", required=True)
    _add_target_args(p)
    _add_eta_args(p)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--levels", type=int, default=99,
                   help="number of evenly spaced interior levels")
    p.add_argument("--pointwise", dest="simultaneous", action="store_false",
                   help="per-level coverage instead of simultaneous")
    p.add_argument("--method", choices=["bootstrap", "asymptotic-kde"],
                   default="bootstrap")
    p.add_argument("--reps-samples", type=int, default=10)
    p.add_argument("--reps-neighbors", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default="bands_result.json")
    p.set_defaults(func=_cmd_bands, simultaneous=True)

    p = sub.add_parser("simulate", help="run a synthetic scaling study")
    p.add_argument("--kind", choices=["homoscedastic", "heteroscedastic"],
                   default="heteroscedastic")
    p.add_argument("--base", choices=["uniform", "truncated_gaussian", "gaussian"],
                   default="uniform")
    p.add_argument("--sweep", choices=["n_samples", "n_rows", "n_times_neighbors"],
                   default="n_samples")
    p.add_argument("--values", type=int, nargs="+", required=True)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--rows", type=int, default=50)
    p.add_argument("--cols", type=int, default=30)
    p.add_argument("--n", type=int, default=100,
                   help="samples per entry (base value)")
    p.add_argument("--eta", type=float, default=None,
                   help="fixed eta; omit to tune per trial")
    p.add_argument("--budget", type=int, default=50)
    p.add_argument("--min-neighbors", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output-prefix", default="simulate_result")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("verify", help="Monte-Carlo checks against exact formulas")
    p.add_argument("subject", choices=["uniform-barycenter", "barycenter-rate"])
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output-prefix", default="verify_result")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PanelParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (NoObservedCellsError, AllTrialsFailedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except NoNeighborsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_NEIGHBORS
    except DistnnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
