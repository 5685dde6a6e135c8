import csv
import itertools
import random

import numpy as np
import pytest

from rankprice import (
    EmptyInput,
    ExperimentConfig,
    InvalidRange,
    SearchParams,
    StopRule,
    TraceEntry,
    assign_prices,
    evolution_stats,
    generate_instance,
    percentile,
    run_experiment,
    save_instance,
    summarize,
)
from rankprice.bench import config_from_dict, params_from_dict


def counting_clock():
    ticks = itertools.count()
    return lambda: next(ticks) * 0.001


# ------------------------------------------------------------- generation


def test_generate_instance_bounds_and_validity():
    inst = generate_instance(2, 8, (18, 66), 1.0, seed=5)
    assert inst.num_products == 2 and inst.num_customers == 8
    assert all(18 <= b <= 66 for b in inst.budgets)
    assert all(None not in row for row in inst.preferences)
    # rows carry distinct positive ranks
    for row in inst.preferences:
        scores = [s for s in row if s is not None]
        assert len(set(scores)) == len(scores)


def test_generate_instance_partial_availability_rows_nonempty():
    inst = generate_instance(3, 20, (5, 9), 0.3, seed=11)
    assert all(any(s is not None for s in row) for row in inst.preferences)


def test_generate_instance_deterministic(tmp_path):
    a = generate_instance(3, 6, (10, 20), 0.8, seed=42)
    b = generate_instance(3, 6, (10, 20), 0.8, seed=42)
    assert a == b
    pa, pb = tmp_path / "a.json", tmp_path / "b.json"
    save_instance(a, pa)
    save_instance(b, pb)
    assert pa.read_bytes() == pb.read_bytes()


def test_generate_instance_rejects_bad_ranges():
    with pytest.raises(InvalidRange):
        generate_instance(2, 4, (0, 10), 1.0, seed=0)
    with pytest.raises(InvalidRange):
        generate_instance(2, 4, (10, 5), 1.0, seed=0)
    with pytest.raises(InvalidRange):
        generate_instance(2, 4, (5, 10), 0.0, seed=0)
    with pytest.raises(InvalidRange):
        generate_instance(2, 4, (5, 10), 1.5, seed=0)


# ------------------------------------------------------------ percentiles


def test_percentile_nearest_rank_matches_numpy():
    rng = random.Random(8)
    for _ in range(50):
        values = [rng.randrange(1000) for _ in range(rng.randint(1, 60))]
        for q in (5, 25, 50, 75, 95):
            ours = percentile(values, q)
            ref = np.percentile(values, q, method="inverted_cdf")
            assert ours == ref


def test_percentile_empty_raises():
    with pytest.raises(EmptyInput):
        percentile([], 50)


def _summary(value, run_id=0):
    from rankprice import RunSummary

    return RunSummary(
        run_id=run_id, seed=run_id, method="vns", init="greedy", pipeline="sfrc",
        best_value=value, best_prices=(1,), evaluations=10, elapsed_ms=1, ls_reverts=0,
    )


def test_summarize_identical_values():
    report = summarize([_summary(807, j) for j in range(100)])
    assert (report.minimum, report.q1, report.median, report.q3, report.maximum) == (
        807, 807, 807, 807, 807,
    )
    assert report.variance == 0.0


def test_summarize_matches_sorted_order_statistics():
    rng = random.Random(77)
    values = [rng.randrange(500, 900) for _ in range(31)]
    report = summarize([_summary(v, j) for j, v in enumerate(values)])
    ordered = sorted(values)
    assert report.minimum == ordered[0]
    assert report.maximum == ordered[-1]
    import math

    assert report.q1 == ordered[math.ceil(0.25 * len(ordered)) - 1]
    assert report.median == ordered[math.ceil(0.50 * len(ordered)) - 1]
    assert report.q3 == ordered[math.ceil(0.75 * len(ordered)) - 1]


def test_summarize_reference_ratios():
    report = summarize([_summary(v, j) for j, v in enumerate([800, 807, 790])], reference=807)
    assert report.hit_rate == pytest.approx(1 / 3)
    assert report.ratio_min == pytest.approx(790 / 807)
    assert report.ratio_max == pytest.approx(1.0)


def test_summarize_empty_raises():
    with pytest.raises(EmptyInput):
        summarize([])


def test_evolution_stats_orders_and_pads():
    t1 = [TraceEntry(10, 0.1, 5), TraceEntry(20, 0.2, 8), TraceEntry(30, 0.3, 9)]
    t2 = [TraceEntry(10, 0.1, 7)]  # stopped early; padded with its last entry
    stats = evolution_stats([t1, t2])
    assert len(stats.checkpoints) == 3
    for c in stats.checkpoints:
        assert c.p5 <= c.p50 <= c.p95
    p50_series = [c.p50 for c in stats.checkpoints]
    assert p50_series == sorted(p50_series)
    assert stats.checkpoints[2].p95 == 9
    assert stats.checkpoints[2].p5 == 7


# ------------------------------------------------------------ experiments


@pytest.fixture
def table1_path(tmp_path, table1):
    path = tmp_path / "table1.json"
    save_instance(table1, path)
    return path


def make_config(table1_path, out_dir, runs=5, method="vns", **params_kw):
    params_kw.setdefault("l0", 20)
    params_kw.setdefault("q", 5)
    params_kw.setdefault("t", 10)
    params_kw.setdefault("stop", StopRule.point_budget(100))
    return ExperimentConfig(
        instance_path=str(table1_path),
        method=method,
        init="greedy",
        pipeline="sfrc",
        params=SearchParams(**params_kw),
        runs=runs,
        base_seed=7,
        out_dir=str(out_dir) if out_dir is not None else None,
    )


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("#")
    return list(csv.DictReader(lines[1:]))


def test_run_experiment_writes_csvs(table1, table1_path, tmp_path):
    out = tmp_path / "out"
    config = make_config(table1_path, out)
    summaries, stats = run_experiment(config, clock=counting_clock())
    assert len(summaries) == 5
    rows = read_csv(out / "summary.csv")
    assert len(rows) == 5
    assert list(rows[0]) == ["run_id", "seed", "method", "init", "pipeline",
                             "evals", "elapsed_ms", "best_value", "best_prices"]
    for row, summary in zip(rows, summaries):
        assert int(row["best_value"]) == summary.best_value
        prices = tuple(int(p) for p in row["best_prices"].split(","))
        # reported prices re-evaluate to the reported value
        assert assign_prices(table1, prices).revenue == summary.best_value
        assert int(row["seed"]) == 7 + int(row["run_id"])

    trace_rows = read_csv(out / "trace.csv")
    assert {int(r["run_id"]) for r in trace_rows} == set(range(5))
    # each run's summary value equals its final trace entry
    finals = {}
    for row in trace_rows:
        finals[int(row["run_id"])] = int(row["best_value"])
    for summary in summaries:
        assert finals[summary.run_id] == summary.best_value

    pct_rows = read_csv(out / "percentiles.csv")
    assert len(pct_rows) == len(stats.checkpoints)
    for row in pct_rows:
        assert int(row["p5"]) <= int(row["p50"]) <= int(row["p95"])
    for column in ("p5", "p50", "p95"):
        series = [int(row[column]) for row in pct_rows]
        assert series == sorted(series)


def test_run_experiment_single_run_percentiles_collapse(table1_path, tmp_path):
    config = make_config(table1_path, tmp_path / "one", runs=1)
    _, stats = run_experiment(config)
    for c in stats.checkpoints:
        assert c.p5 == c.p50 == c.p95


def test_rerun_reproduces_csv_bytes(table1_path, tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    run_experiment(make_config(table1_path, out_a), clock=counting_clock())
    run_experiment(make_config(table1_path, out_b), clock=counting_clock())
    for name in ("summary.csv", "trace.csv", "percentiles.csv"):
        body_a = [l for l in (out_a / name).read_text().splitlines() if not l.startswith("#")]
        body_b = [l for l in (out_b / name).read_text().splitlines() if not l.startswith("#")]
        assert body_a == body_b


def test_workers_do_not_change_results(table1_path, tmp_path):
    config = make_config(table1_path, None, runs=4)
    seq, _ = run_experiment(config, workers=1)
    par, _ = run_experiment(config, workers=2)
    strip = lambda s: (s.run_id, s.seed, s.best_value, s.best_prices, s.evaluations)
    assert [strip(s) for s in seq] == [strip(s) for s in par]


def test_table1_vns_sfrc_experiment_always_optimal(table1_path, tmp_path):
    config = make_config(
        table1_path, None, runs=100, l0=50, q=10, t=25,
        stop=StopRule.point_budget(500),
    )
    summaries, _ = run_experiment(config)
    assert all(s.best_value == 236 for s in summaries)


def test_config_round_trip(table1_path):
    raw = {
        "instance_path": str(table1_path),
        "method": "genetic",
        "init": "random",
        "pipeline": "sf",
        "params": {"l0": 30, "q": 30, "t": 10,
                   "stop": {"kind": "points", "limit": 200}},
        "runs": 3,
        "base_seed": 11,
        "out_dir": None,
    }
    config = config_from_dict(raw)
    assert config.method == "genetic"
    assert config.params.q == 30
    assert config.params.stop == StopRule.point_budget(200)
    overridden = config_from_dict(raw, runs=9)
    assert overridden.runs == 9


def test_params_from_dict_defaults():
    params = params_from_dict({"l0": 10, "q": 2, "t": 5})
    assert params.stop == StopRule.point_budget(24000)
