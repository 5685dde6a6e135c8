"""Command-line entry point (``rankprice``)."""

from __future__ import annotations

import argparse
import json
import sys

from .bench import (
    ExperimentConfig,
    config_from_dict,
    generate_instance,
    run_experiment,
    summarize,
)
from .errors import RankPriceError
from .evaluate import assign_prices
from .exact import DEFAULT_ENUMERATION_CAP, brute_force, write_lp
from .model import build_grid, load_instance, save_instance
from .search import SearchParams, StopRule

DEFAULT_POINT_BUDGET = 24000
DEFAULT_Q = {"naive": 100, "vns": 100, "genetic": 1000}


def _add_solve_parser(sub):
    p = sub.add_parser("solve", help="run one seeded search on an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--method", choices=("naive", "vns", "genetic"), required=True)
    p.add_argument("--init", choices=("random", "greedy"), default="random")
    p.add_argument("--local-search", default="", metavar="LETTERS",
                   help="pipeline letters: s=slack f=fill r=reassignment "
                        "c=conditional reassignment o=optimization-based")
    p.add_argument("--l0", type=int, default=1000)
    p.add_argument("--q", type=int, default=None,
                   help="elite set size (default 100, or 1000 for genetic)")
    p.add_argument("--t", type=int, default=500)
    stop = p.add_mutually_exclusive_group()
    stop.add_argument("--max-points", type=int, default=None)
    stop.add_argument("--time-limit", type=float, default=None)
    stop.add_argument("--iterations", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, metavar="DIR",
                   help="write summary/trace/percentiles CSVs here")
    p.add_argument("--dedup", action="store_true",
                   help="discard re-drawn vectors instead of counting them")
    p.add_argument("--vns-reset-radius", action="store_true",
                   help="reset the VNS radius to 1 after an improvement")
    p.add_argument("--parents-with-replacement", action="store_true",
                   help="allow the genetic method to pick the same parent twice")


def _stop_rule(args) -> StopRule:
    if args.max_points is not None:
        return StopRule.point_budget(args.max_points)
    if args.time_limit is not None:
        return StopRule.time_limit(args.time_limit)
    if args.iterations is not None:
        return StopRule.iterations(args.iterations)
    return StopRule.point_budget(DEFAULT_POINT_BUDGET)


def _cmd_solve(args) -> int:
    q = args.q if args.q is not None else min(DEFAULT_Q[args.method], args.l0)
    params = SearchParams(
        l0=args.l0,
        q=q,
        t=args.t,
        stop=_stop_rule(args),
        init=args.init,
        seed=args.seed,
        dedup=args.dedup,
        vns_reset_radius=args.vns_reset_radius,
        parents_with_replacement=args.parents_with_replacement,
    )
    config = ExperimentConfig(
        instance_path=args.instance,
        method=args.method,
        init=args.init,
        pipeline=args.local_search,
        params=params,
        runs=1,
        base_seed=args.seed,
        out_dir=args.out,
    )
    summaries, _ = run_experiment(config)
    s = summaries[0]
    print(f"method: {s.method}  init: {s.init}  pipeline: {s.pipeline or '-'}  seed: {s.seed}")
    print(f"best value: {s.best_value}")
    print(f"best prices: {','.join(map(str, s.best_prices))}")
    print(f"evaluations: {s.evaluations}  elapsed_ms: {s.elapsed_ms}  "
          f"local-search reverts: {s.ls_reverts}")
    if args.out:
        print(f"wrote summary.csv, trace.csv, percentiles.csv to {args.out}")
    return 0


def _cmd_bench(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    config = config_from_dict(
        raw, instance_path=args.instance, runs=args.runs, out_dir=args.out
    )
    summaries, _ = run_experiment(config, workers=args.workers)
    report = summarize(summaries, reference=args.reference)
    print(f"runs: {report.count}")
    print(f"best value: min={report.minimum} q1={report.q1} median={report.median} "
          f"q3={report.q3} max={report.maximum}")
    if report.hit_rate is not None:
        print(f"hit rate vs {args.reference}: {report.hit_rate:.3f}  "
              f"ratios: min={report.ratio_min:.4f} median={report.ratio_median:.4f} "
              f"max={report.ratio_max:.4f}")
    if config.out_dir:
        print(f"wrote CSVs to {config.out_dir}")
    return 0


def _cmd_gen(args) -> int:
    inst = generate_instance(
        num_products=args.products,
        num_customers=args.customers,
        budget_range=(args.budget_lo, args.budget_hi),
        availability_prob=args.avail,
        seed=args.seed,
    )
    save_instance(inst, args.out)
    grid = build_grid(inst)
    print(f"wrote {args.out}: I={inst.num_products} K={inst.num_customers} M={grid.size}")
    return 0


def _cmd_exact(args) -> int:
    inst = load_instance(args.instance)
    grid = build_grid(inst)
    optimum, optima = brute_force(inst, grid, cap=args.cap)
    print(f"optimum: {optimum}")
    print(f"optimal price vectors ({len(optima)}):")
    for indices in optima:
        print("  " + ",".join(map(str, grid.prices_of(indices))))
    return 0


def _cmd_export_lp(args) -> int:
    inst = load_instance(args.instance)
    write_lp(inst, build_grid(inst), args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_eval(args) -> int:
    inst = load_instance(args.instance)
    grid = build_grid(inst)
    prices = tuple(int(part) for part in args.prices.split(","))
    if len(prices) != inst.num_products:
        raise RankPriceError(
            f"expected {inst.num_products} prices, got {len(prices)}"
        )
    a = assign_prices(inst, prices)
    off_grid = [p for p in prices if p not in grid.values]
    if off_grid:
        print(f"note: prices not on the budget grid: {off_grid}")
    for k, choice in enumerate(a.chosen):
        if choice is None:
            print(f"customer {k + 1}: buys nothing")
        else:
            print(f"customer {k + 1}: buys product {choice + 1} at {prices[choice]}")
    print(f"revenue: {a.revenue}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankprice",
        description="Heuristic and exact solvers for rank-based unit-demand pricing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    _add_solve_parser(sub)

    p = sub.add_parser("bench", help="run a configuration many times and aggregate")
    p.add_argument("--instance", default=None)
    p.add_argument("--config", required=True, help="JSON experiment configuration")
    p.add_argument("--runs", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None, help="override the config's output directory")
    p.add_argument("--reference", type=int, default=None,
                   help="reference value for hit rates and ratios")

    p = sub.add_parser("gen", help="generate a random instance file")
    p.add_argument("--products", type=int, required=True)
    p.add_argument("--customers", type=int, required=True)
    p.add_argument("--budget-lo", type=int, required=True)
    p.add_argument("--budget-hi", type=int, required=True)
    p.add_argument("--avail", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("exact", help="brute-force the optimum over the budget grid")
    p.add_argument("--instance", required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP)

    p = sub.add_parser("export-lp", help="write the single-level model in LP format")
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="evaluate one price vector on an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--prices", required=True, metavar="V1,V2,...")

    return parser


COMMANDS = {
    "solve": _cmd_solve,
    "bench": _cmd_bench,
    "gen": _cmd_gen,
    "exact": _cmd_exact,
    "export-lp": _cmd_export_lp,
    "eval": _cmd_eval,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except RankPriceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
