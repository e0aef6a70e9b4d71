"""Command-line surface.

Subcommands: entropy (print a dataset's measure), subset (generate and save
a data subset), run (the full subset-then-fine-tune workflow), benchmark
(sweep strategies and subset sizes), serve-toy (expose the builtin toy
backend over the adapter protocol). Exit codes: 0 success, 1 input/config
error, 2 adapter error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from typing import Optional

import numpy as np

from substrat import baselines
from substrat.dataset import Dataset, default_subset_size, load_csv, view
from substrat.errors import AdapterError, SubstratError
from substrat.gendst import GaParams
from substrat.measures import dataset_entropy, full_measure
from substrat.pipeline import resolve_adapter, run_full_automl, run_pipeline

DEFAULT_SEED = 42  # every command is seeded; override with --seed


class CliParser(argparse.ArgumentParser):
    """argparse variant whose usage errors exit 1 (2 is reserved for
    adapter failures)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _resolve_rows(spec: str, n_rows: int) -> int:
    if spec == "sqrt":
        return max(1, min(n_rows, int(math.sqrt(n_rows) + 0.5)))
    n = int(spec)
    if not 1 <= n <= n_rows:
        raise ValueError(f"--rows {spec} outside [1, {n_rows}]")
    return n


def _resolve_cols(spec: str, n_cols: int) -> int:
    if "." in spec:
        frac = float(spec)
        if not 0.0 < frac <= 1.0:
            raise ValueError(f"--cols fraction {spec} outside (0, 1]")
        return min(n_cols, max(2, int(frac * n_cols + 0.5)))
    m = int(spec)
    if not 2 <= m <= n_cols:
        raise ValueError(f"--cols {spec} outside [2, {n_cols}]")
    return m


def _resolve_size(args, dataset: Dataset) -> tuple[int, int]:
    dn, dm = default_subset_size(dataset.n_rows, dataset.n_cols)
    n = _resolve_rows(args.rows, dataset.n_rows) if args.rows else dn
    m = _resolve_cols(args.cols, dataset.n_cols) if args.cols else dm
    return n, m


def _load(args) -> Dataset:
    return load_csv(args.input, args.target, delimiter=args.delimiter,
                    bins=args.bins, name=args.input)


def _write_json(path, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _ga_params(args, seed: int) -> GaParams:
    return GaParams(generations=args.generations, population=args.population,
                    mutation_prob=args.mutation_prob,
                    elite_fraction=args.elite_fraction,
                    row_col_prob=args.row_col_prob, seed=seed)


def _baseline_opts(args, strategy: Optional[str] = None) -> dict:
    strategy = strategy if strategy is not None else args.strategy
    opts: dict = {}
    if strategy in ("mc", "mc_24h"):
        if args.mc_iterations:
            opts["iterations"] = args.mc_iterations
        if args.mc_seconds:
            opts["seconds"] = args.mc_seconds
    if strategy == "mab":
        opts["rounds"] = args.mab_rounds
        opts["epsilon"] = args.mab_epsilon
    return opts


# ---------------------------------------------------------------- commands

def cmd_entropy(args) -> int:
    dataset = _load(args)
    if args.rows or args.cols:
        n, m = _resolve_size(args, dataset)
        from substrat.dataset import random_subset
        subset = random_subset(dataset, n, m, np.random.default_rng(args.seed))
        value = dataset_entropy(view(dataset, subset))
    else:
        value = full_measure(dataset, "entropy")
    print(f"{value:.4f}")
    return 0


def cmd_subset(args) -> int:
    dataset = _load(args)
    n, m = _resolve_size(args, dataset)
    started = time.perf_counter()
    if args.strategy == "gendst":
        from substrat.gendst import run_gendst
        params = _ga_params(args, args.seed)
        params.subset_rows, params.subset_cols = n, m
        result = run_gendst(dataset, "entropy", params)
    else:
        result = baselines.run_baseline(
            args.strategy, dataset, "entropy", n=n, m=m,
            rng=np.random.default_rng(args.seed), **_baseline_opts(args))
    wall = time.perf_counter() - started

    out_csv = args.out or "subset.csv"
    view(dataset, result.best).to_csv(out_csv)
    sidecar = {
        "input": args.input,
        "target": args.target,
        "strategy": args.strategy,
        "seed": args.seed,
        "rows": list(result.best.rows),
        "cols": list(result.best.cols),
        "n": result.best.n,
        "m": result.best.m,
        "loss": result.best_loss,
        "generations": result.generations_run,
        "evaluations": result.evaluations,
        "wall_time_s": None if args.deterministic else wall,
        "config": _resolved_config(args, n, m),
    }
    _write_json(os.path.splitext(out_csv)[0] + ".json", sidecar)
    print(f"wrote {out_csv} ({result.best.n}x{result.best.m}, loss {result.best_loss:.6f})")
    return 0


def _resolved_config(args, n: int, m: int) -> dict:
    cfg = {"rows": n, "cols": m, "seed": args.seed, "strategy": args.strategy,
           "delimiter": args.delimiter, "bins": args.bins,
           "deterministic": args.deterministic}
    if args.strategy == "gendst":
        cfg.update({"generations": args.generations, "population": args.population,
                    "mutation_prob": args.mutation_prob,
                    "elite_fraction": args.elite_fraction,
                    "row_col_prob": args.row_col_prob})
    return cfg


def _budgets(args) -> dict:
    return {"time_budget_s": args.budget_s,
            "eval_budget": args.budget_evals,
            "fine_tune_frac": args.fine_tune_frac}


def cmd_run(args) -> int:
    dataset = _load(args)
    n, m = _resolve_size(args, dataset)
    adapter = resolve_adapter(args.adapter)
    budgets = _budgets(args)
    try:
        full = None
        log: list[dict] = []
        if args.with_full:
            full = run_full_automl(dataset, adapter,
                                   time_budget_s=budgets["time_budget_s"],
                                   eval_budget=budgets["eval_budget"],
                                   seed=args.seed, request_log=log)
        report = run_pipeline(
            dataset, adapter, strategy=args.strategy, n=n, m=m,
            time_budget_s=budgets["time_budget_s"],
            eval_budget=budgets["eval_budget"],
            fine_tune=not args.no_fine_tune,
            fine_tune_frac=budgets["fine_tune_frac"],
            ga_params=_ga_params(args, args.seed) if args.strategy == "gendst" else None,
            baseline_opts=_baseline_opts(args) if args.strategy != "gendst" else None,
            seed=args.seed, full=full)
        report.request_log = log + report.request_log
    finally:
        adapter.close()

    payload = report.to_dict(deterministic=args.deterministic)
    payload["config"] = _resolved_config(args, n, m)
    payload["config"].update(_budgets(args))
    _write_json(args.out, payload)

    if args.format == "table":
        _print_run_table(report)
    return 0


def _print_run_table(report) -> None:
    rows = [
        ("strategy", report.strategy),
        ("subset", f"{report.subset.n}x{report.subset.m}"),
        ("subset loss", f"{report.search.best_loss:.6f}"),
        ("intermediate", f"{report.intermediate.model_family} "
                         f"(acc {report.intermediate.accuracy:.4f})"),
        ("final", f"{report.final.model_family} (acc {report.final.accuracy:.4f})"),
    ]
    if report.full is not None:
        rows.append(("full-automl", f"{report.full.model_family} "
                                    f"(acc {report.full.accuracy:.4f})"))
        if report.time_reduction is not None:
            rows.append(("time-reduction", f"{report.time_reduction:.2%}"))
        if report.relative_accuracy is not None:
            rows.append(("relative-accuracy", f"{report.relative_accuracy:.2%}"))
    width = max(len(k) for k, _ in rows)
    for key, val in rows:
        print(f"{key:<{width}}  {val}", file=sys.stderr)


def cmd_benchmark(args) -> int:
    strategies = [s for s in args.strategies.split(",") if s]
    if not strategies:
        raise SubstratError("benchmark needs at least one strategy")
    dataset = _load(args)
    adapter = resolve_adapter(args.adapter)
    budgets = _budgets(args)
    rows_grid = [s for s in args.rows_grid.split(",") if s]
    cols_grid = [s for s in args.cols_grid.split(",") if s]

    cells = []
    try:
        full = run_full_automl(dataset, adapter,
                               time_budget_s=budgets["time_budget_s"],
                               eval_budget=budgets["eval_budget"], seed=args.seed)
        for strategy in strategies:
            for rows_spec in rows_grid:
                for cols_spec in cols_grid:
                    cell = {"strategy": strategy, "rows_spec": rows_spec,
                            "cols_spec": cols_spec}
                    try:
                        n = _resolve_rows(rows_spec, dataset.n_rows)
                        m = _resolve_cols(cols_spec, dataset.n_cols)
                        report = run_pipeline(
                            dataset, adapter, strategy=strategy, n=n, m=m,
                            time_budget_s=budgets["time_budget_s"],
                            eval_budget=budgets["eval_budget"],
                            fine_tune=not args.no_fine_tune,
                            fine_tune_frac=budgets["fine_tune_frac"],
                            ga_params=(_ga_params(args, args.seed)
                                       if strategy == "gendst" else None),
                            baseline_opts=(_baseline_opts(args, strategy)
                                           if strategy != "gendst" else None),
                            seed=args.seed, full=full)
                        cell.update({
                            "n": n, "m": m,
                            "loss": report.search.best_loss,
                            "final_accuracy": report.final.accuracy,
                            "time_reduction": (None if args.deterministic
                                               else report.time_reduction),
                            "relative_accuracy": report.relative_accuracy,
                        })
                    except AdapterError:
                        raise
                    except (SubstratError, ValueError) as exc:
                        cell["error"] = getattr(exc, "code", type(exc).__name__)
                        cell["message"] = str(exc)
                    cells.append(cell)
    finally:
        adapter.close()

    payload = {
        "input": args.input,
        "target": args.target,
        "seed": args.seed,
        "budgets": {"time_budget_s": None if args.deterministic else budgets["time_budget_s"],
                    "eval_budget": budgets["eval_budget"],
                    "fine_tune_frac": budgets["fine_tune_frac"]},
        "full": full.to_dict(deterministic=args.deterministic),
        "cells": cells,
    }
    _write_json(args.out, payload)
    return 0


def cmd_serve_toy(args) -> int:
    from substrat import toy_automl
    toy_automl.serve()
    return 0


# ---------------------------------------------------------------- parser

def _add_common(p: argparse.ArgumentParser, need_input: bool = True) -> None:
    if need_input:
        p.add_argument("--input", required=True, help="CSV file to load")
        p.add_argument("--target", required=True, help="target column name")
        p.add_argument("--delimiter", default=",", help="CSV delimiter")
        p.add_argument("--bins", type=int, default=0,
                       help="equal-width bins for numeric feature columns (0 = off)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--deterministic", action="store_true",
                   help="emit byte-reproducible JSON (wall times nulled)")


def _add_size(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rows", default=None,
                   help="subset rows: a count or 'sqrt' (default sqrt)")
    p.add_argument("--cols", default=None,
                   help="subset cols: a count or a fraction like 0.25 (default 0.25)")


def _add_tuning(p: argparse.ArgumentParser) -> None:
    p.add_argument("--generations", type=int, default=30)
    p.add_argument("--population", type=int, default=100)
    p.add_argument("--mutation-prob", type=float, default=0.025, dest="mutation_prob")
    p.add_argument("--elite-fraction", type=float, default=0.05, dest="elite_fraction")
    p.add_argument("--row-col-prob", type=float, default=0.9, dest="row_col_prob")
    p.add_argument("--mc-iterations", type=int, default=0, dest="mc_iterations")
    p.add_argument("--mc-seconds", type=float, default=0, dest="mc_seconds")
    p.add_argument("--mab-rounds", type=int, default=1000, dest="mab_rounds")
    p.add_argument("--mab-epsilon", type=float, default=0.1, dest="mab_epsilon")


def _add_strategy(p: argparse.ArgumentParser) -> None:
    p.add_argument("--strategy", default="gendst",
                   choices=["gendst", "mc", "mc_100", "mc_100k", "mc_24h", "mab",
                            "greedy_seq", "greedy_mult", "km", "ig_rand", "ig_km"])
    _add_tuning(p)


def _add_adapter(p: argparse.ArgumentParser) -> None:
    p.add_argument("--adapter", default="builtin-toy",
                   help="adapter command line to spawn, or 'builtin-toy' "
                        "(SUBSTRAT_ADAPTER overrides)")
    p.add_argument("--budget-s", type=float, default=60.0, dest="budget_s")
    p.add_argument("--budget-evals", type=int, default=None, dest="budget_evals")
    p.add_argument("--fine-tune-frac", type=float, default=0.25, dest="fine_tune_frac")
    p.add_argument("--no-fine-tune", action="store_true", dest="no_fine_tune")


def build_parser() -> CliParser:
    parser = CliParser(prog="substrat",
                       description="Measure-preserving data subsets for faster AutoML")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    p = sub.add_parser("entropy", help="print the dataset entropy")
    _add_common(p)
    _add_size(p)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("subset", help="search a subset and write CSV + sidecar")
    _add_common(p)
    _add_size(p)
    _add_strategy(p)
    p.add_argument("--out", default=None, help="subset CSV path (default subset.csv)")
    p.set_defaults(func=cmd_subset)

    p = sub.add_parser("run", help="run the subset-then-fine-tune workflow")
    _add_common(p)
    _add_size(p)
    _add_strategy(p)
    _add_adapter(p)
    p.add_argument("--with-full", action="store_true", dest="with_full",
                   help="also run the Full-AutoML baseline and report metrics")
    p.add_argument("--out", default=None, help="report JSON path (default stdout)")
    p.add_argument("--format", default="table", choices=["json", "table"],
                   help="also print a summary table to stderr")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("benchmark", help="sweep strategies and subset sizes")
    _add_common(p)
    _add_adapter(p)
    _add_tuning(p)
    p.add_argument("--strategies", required=True,
                   help="comma-separated strategy list")
    p.add_argument("--rows-grid", default="sqrt", dest="rows_grid")
    p.add_argument("--cols-grid", default="0.25", dest="cols_grid")
    p.add_argument("--out", default=None, help="report JSON path (default stdout)")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("serve-toy", help="serve the builtin toy backend "
                                         "over the adapter protocol")
    p.set_defaults(func=cmd_serve_toy)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except AdapterError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 2
    except SubstratError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
