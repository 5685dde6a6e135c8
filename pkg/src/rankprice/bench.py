"""Experiment orchestration: instance generation, repeated seeded runs, CSVs.

A benchmark executes one (method, init, pipeline, params) configuration many
times with consecutive seeds and aggregates the per-run best values into
distribution and evolution statistics. Runs are independent, so they can be
spread over worker processes; results are always merged in run-id order,
making the output independent of scheduling.

Three CSV files are written per experiment: ``summary.csv`` (one row per
run), ``trace.csv`` (one row per batch snapshot per run) and
``percentiles.csv`` (P5/P50/P95 of best-so-far per checkpoint). Each file
starts with one ``#`` metadata line; that line carries the only timestamp,
so re-running a configuration with the same base seed reproduces the
remaining bytes exactly (elapsed columns included, when a deterministic
clock is injected).
"""

from __future__ import annotations

import csv
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from math import ceil
from pathlib import Path
from typing import Sequence

from .errors import EmptyInput, InvalidRange, OutputWriteError, RankPriceError
from .model import Instance, build_grid, load_instance
from .search import (
    SearchParams,
    SearchResult,
    StopRule,
    TraceEntry,
    genetic_search,
    naive_search,
    vns_search,
)

METHODS = {"naive": naive_search, "vns": vns_search, "genetic": genetic_search}

SUMMARY_COLUMNS = (
    "run_id",
    "seed",
    "method",
    "init",
    "pipeline",
    "evals",
    "elapsed_ms",
    "best_value",
    "best_prices",
)
TRACE_COLUMNS = ("run_id", "evals", "elapsed_ms", "best_value")
PERCENTILE_COLUMNS = ("checkpoint", "evals", "elapsed_ms", "p5", "p50", "p95")


def generate_instance(
    num_products: int,
    num_customers: int,
    budget_range: tuple[int, int],
    availability_prob: float,
    seed: int,
    name: str | None = None,
) -> Instance:
    """Random instance: uniform integer budgets, random per-customer rankings.

    Each product is available to a customer with ``availability_prob``
    (rows are redrawn until nonempty); the available products get distinct
    scores from a uniformly random permutation.
    """
    lo, hi = budget_range
    if not 1 <= lo <= hi:
        raise InvalidRange(f"budget range must satisfy 1 <= lo <= hi, got [{lo}, {hi}]")
    if not 0 < availability_prob <= 1:
        raise InvalidRange(f"availability must be in (0, 1], got {availability_prob}")
    rng = random.Random(seed)
    budgets = tuple(rng.randint(lo, hi) for _ in range(num_customers))
    preferences = []
    for _ in range(num_customers):
        while True:
            available = [i for i in range(num_products) if rng.random() < availability_prob]
            if available:
                break
        rng.shuffle(available)
        row: list[int | None] = [None] * num_products
        for rank, i in enumerate(available):
            row[i] = rank + 1
        preferences.append(tuple(row))
    return Instance(
        name=name or f"gen-I{num_products}-K{num_customers}-seed{seed}",
        num_products=num_products,
        num_customers=num_customers,
        budgets=budgets,
        preferences=tuple(preferences),
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """One benchmark configuration; run j uses seed ``base_seed + j``."""

    instance_path: str
    method: str
    init: str
    pipeline: str
    params: SearchParams
    runs: int
    base_seed: int
    out_dir: str | None

    def __post_init__(self):
        if self.method not in METHODS:
            raise RankPriceError(f"unknown method {self.method!r}")
        if self.runs < 1:
            raise RankPriceError("runs must be at least 1")


@dataclass(frozen=True)
class RunSummary:
    run_id: int
    seed: int
    method: str
    init: str
    pipeline: str
    best_value: int
    best_prices: tuple[int, ...]
    evaluations: int
    elapsed_ms: int
    ls_reverts: int


@dataclass(frozen=True)
class CheckpointStats:
    checkpoint: int
    evals: int
    elapsed_ms: int
    p5: int
    p50: int
    p95: int


@dataclass(frozen=True)
class EvolutionStats:
    checkpoints: tuple[CheckpointStats, ...]


def percentile(values: Sequence[float], q: float):
    """Nearest-rank percentile of a nonempty sample (q in (0, 100])."""
    if not values:
        raise EmptyInput("percentile of an empty sample")
    ordered = sorted(values)
    rank = max(1, ceil(q / 100.0 * len(ordered)))
    return ordered[rank - 1]


def _run_one(
    inst: Instance,
    config: ExperimentConfig,
    run_id: int,
    clock=None,
) -> tuple[RunSummary, tuple[TraceEntry, ...]]:
    grid = build_grid(inst)
    seed = config.base_seed + run_id
    params = replace(config.params, seed=seed, init=config.init)
    search = METHODS[config.method]
    result: SearchResult = search(
        inst, grid, params, pipeline=config.pipeline or None, clock=clock
    )
    summary = RunSummary(
        run_id=run_id,
        seed=seed,
        method=config.method,
        init=config.init,
        pipeline=config.pipeline,
        best_value=result.best_value,
        best_prices=result.best_prices,
        evaluations=result.evaluations,
        elapsed_ms=int(round(result.elapsed * 1000)),
        ls_reverts=result.ls_stats.total_reverted,
    )
    return summary, result.trace


def _worker(args):
    inst, config, run_id = args
    return _run_one(inst, config, run_id)


def evolution_stats(traces: Sequence[Sequence[TraceEntry]]) -> EvolutionStats:
    """P5/P50/P95 of best-so-far across runs at every batch checkpoint.

    Traces ending early (time-limited runs) are padded with their final
    entry; evals and elapsed per checkpoint are the medians across runs.
    """
    if not traces:
        raise EmptyInput("no traces to aggregate")
    depth = max(len(t) for t in traces)
    rows = []
    for c in range(depth):
        entries = [t[min(c, len(t) - 1)] for t in traces]
        values = [e.best for e in entries]
        rows.append(
            CheckpointStats(
                checkpoint=c,
                evals=percentile([e.evals for e in entries], 50),
                elapsed_ms=int(round(percentile([e.elapsed for e in entries], 50) * 1000)),
                p5=percentile(values, 5),
                p50=percentile(values, 50),
                p95=percentile(values, 95),
            )
        )
    return EvolutionStats(checkpoints=tuple(rows))


@dataclass(frozen=True)
class DistributionReport:
    count: int
    minimum: int
    q1: int
    median: int
    q3: int
    maximum: int
    variance: float
    hit_rate: float | None
    ratio_min: float | None
    ratio_median: float | None
    ratio_max: float | None


def summarize(
    summaries: Sequence[RunSummary], reference: int | None = None
) -> DistributionReport:
    """Distribution of per-run best values, optionally against a reference.

    ``hit_rate`` is the fraction of runs whose best value reaches (or
    exceeds) the reference; ratios divide each run's best by the reference.
    """
    if not summaries:
        raise EmptyInput("summarize needs at least one run")
    values = [s.best_value for s in summaries]
    n = len(values)
    mean = sum(values) / n
    report = {
        "count": n,
        "minimum": min(values),
        "q1": percentile(values, 25),
        "median": percentile(values, 50),
        "q3": percentile(values, 75),
        "maximum": max(values),
        "variance": sum((v - mean) ** 2 for v in values) / n,
    }
    if reference is not None:
        ratios = sorted(v / reference for v in values)
        report.update(
            hit_rate=sum(1 for v in values if v >= reference) / n,
            ratio_min=ratios[0],
            ratio_median=percentile(ratios, 50),
            ratio_max=ratios[-1],
        )
    else:
        report.update(hit_rate=None, ratio_min=None, ratio_median=None, ratio_max=None)
    return DistributionReport(**report)


def _meta_line(config: ExperimentConfig) -> str:
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return (
        f"# rankprice bench method={config.method} init={config.init} "
        f"pipeline={config.pipeline or '-'} instance={config.instance_path} "
        f"runs={config.runs} base_seed={config.base_seed} generated={stamp}"
    )


def _write_csv(path: Path, meta: str, columns, rows) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(meta + "\n")
            writer = csv.writer(fh)
            writer.writerow(columns)
            writer.writerows(rows)
    except OSError as exc:
        raise OutputWriteError(f"cannot write {path}: {exc}") from exc


def write_outputs(
    out_dir,
    config: ExperimentConfig,
    summaries: Sequence[RunSummary],
    traces: Sequence[Sequence[TraceEntry]],
    stats: EvolutionStats,
) -> None:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputWriteError(f"cannot create {out}: {exc}") from exc
    meta = _meta_line(config)
    _write_csv(
        out / "summary.csv",
        meta,
        SUMMARY_COLUMNS,
        [
            (
                s.run_id,
                s.seed,
                s.method,
                s.init,
                s.pipeline,
                s.evaluations,
                s.elapsed_ms,
                s.best_value,
                ",".join(map(str, s.best_prices)),
            )
            for s in summaries
        ],
    )
    _write_csv(
        out / "trace.csv",
        meta,
        TRACE_COLUMNS,
        [
            (s.run_id, e.evals, int(round(e.elapsed * 1000)), e.best)
            for s, trace in zip(summaries, traces)
            for e in trace
        ],
    )
    _write_csv(
        out / "percentiles.csv",
        meta,
        PERCENTILE_COLUMNS,
        [
            (c.checkpoint, c.evals, c.elapsed_ms, c.p5, c.p50, c.p95)
            for c in stats.checkpoints
        ],
    )


def run_experiment(
    config: ExperimentConfig, workers: int = 1, clock=None
) -> tuple[list[RunSummary], EvolutionStats]:
    """Execute all runs of a configuration and write the CSV outputs.

    ``workers`` > 1 spreads runs over processes; a custom ``clock`` is only
    meaningful in-process and therefore requires workers=1.
    """
    if workers > 1 and clock is not None:
        raise RankPriceError("clock injection requires workers=1")
    inst = load_instance(config.instance_path)
    results: list[tuple[RunSummary, tuple[TraceEntry, ...]]] = []
    if workers > 1:
        jobs = [(inst, config, run_id) for run_id in range(config.runs)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_worker, jobs))
    else:
        for run_id in range(config.runs):
            results.append(_run_one(inst, config, run_id, clock=clock))
    results.sort(key=lambda pair: pair[0].run_id)
    summaries = [s for s, _ in results]
    traces = [t for _, t in results]
    stats = evolution_stats(traces)
    if config.out_dir is not None:
        write_outputs(config.out_dir, config, summaries, traces, stats)
    return summaries, stats


def params_from_dict(raw: dict) -> SearchParams:
    """SearchParams from a JSON-style dict; ``stop`` is {kind, limit}."""
    data = dict(raw)
    stop = data.pop("stop", None)
    if stop is not None:
        data["stop"] = StopRule(kind=stop["kind"], limit=stop["limit"])
    return SearchParams(**data)


def config_from_dict(raw: dict, **overrides) -> ExperimentConfig:
    """ExperimentConfig from a JSON-style dict, with keyword overrides."""
    data = dict(raw)
    data.update({k: v for k, v in overrides.items() if v is not None})
    params = data.get("params", SearchParams())
    if isinstance(params, dict):
        params = params_from_dict(params)
    data["params"] = params
    data.setdefault("init", data["params"].init)
    data.setdefault("pipeline", "")
    data.setdefault("base_seed", 0)
    data.setdefault("out_dir", None)
    return ExperimentConfig(
        instance_path=data["instance_path"],
        method=data["method"],
        init=data["init"],
        pipeline=data["pipeline"],
        params=data["params"],
        runs=int(data["runs"]),
        base_seed=int(data["base_seed"]),
        out_dir=data["out_dir"],
    )
