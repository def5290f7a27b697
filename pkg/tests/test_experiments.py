from __future__ import annotations

import csv
import io
from fractions import Fraction

import pytest

from presched import (
    Job,
    Schedule,
    SchedError,
    assemble_instance,
    experiment_competitive,
    gadget_crossing_counts,
    gantt_text,
    gen_online_lb_gadget,
    run_onl,
    to_csv,
)
from presched.experiments import CSV_COLUMNS, build_family_instance

HALF = Fraction(1, 2)


def test_csv_columns_are_stable():
    assert CSV_COLUMNS == (
        "family",
        "m",
        "d",
        "n",
        "seed",
        "scheduler",
        "makespan",
        "baseline",
        "ratio",
    )


def test_build_family_instance_dispatch():
    online = build_family_instance("gadget", {"m": 2}, seed=3)
    assert online.meta["family"] == "gadget"
    online = build_family_instance("random", {"n": 6}, seed=1)
    assert online.meta["family"] == "random"
    with pytest.raises(SchedError):
        build_family_instance("no-such-family", {}, seed=0)


def test_killer_experiment_rows():
    report = experiment_competitive(
        "greedy-killer", [{"n": 4}], schedulers=("greedy", "onl"), trials=2, seed_base=0
    )
    assert len(report.rows) == 4
    greedy_rows = [r for r in report.rows if r.scheduler == "greedy"]
    assert all(r.makespan == 20 and r.baseline == 11 for r in greedy_rows)
    onl_rows = [r for r in report.rows if r.scheduler == "onl"]
    assert all(r.makespan == 14 and r.baseline == 11 for r in onl_rows)
    for row in report.rows:
        assert row.ratio == pytest.approx(row.makespan / row.baseline)
        assert row.n == 12
        assert row.family == "greedy-killer"


def test_killer_aggregates():
    report = experiment_competitive(
        "greedy-killer", [{"n": 4}], schedulers=("greedy",), trials=3, seed_base=5
    )
    agg = report.aggregates[0]
    assert agg.scheduler == "greedy"
    assert agg.runs == 3
    assert agg.mean_ratio == pytest.approx(20 / 11)
    assert agg.std_ratio == pytest.approx(0.0)


def test_experiment_deterministic():
    a = experiment_competitive("random", [{"n": 6}], trials=3, seed_base=2)
    b = experiment_competitive("random", [{"n": 6}], trials=3, seed_base=2)
    assert to_csv(a) == to_csv(b)


def test_random_family_uses_brute_force_baseline():
    report = experiment_competitive("random", [{"n": 5}], trials=4, seed_base=0)
    for row in report.rows:
        assert row.ratio >= 1.0  # baseline is the true optimum at this size


def test_csv_round_trips_through_reader():
    report = experiment_competitive(
        "greedy-killer", [{"n": 4}], schedulers=("greedy",), trials=2
    )
    text = to_csv(report)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 2
    assert rows[0]["family"] == "greedy-killer"
    assert int(rows[0]["makespan"]) == 20
    assert float(rows[0]["ratio"]) == pytest.approx(20 / 11, abs=1e-4)


def test_gadget_means_rise_with_m():
    report = experiment_competitive("gadget", [{"m": 2}, {"m": 3}], trials=2, seed_base=0)
    by_m = {agg.m: agg.mean_ratio for agg in report.aggregates}
    assert by_m[2] < by_m[3]


def test_crossing_counts_per_gadget():
    online = gen_online_lb_gadget(2, seed=0)
    sched, _trace = run_onl(online)
    counts = gadget_crossing_counts(online, sched)
    assert counts == [2, 2, 1, 2]
    assert len(counts) == len(online.meta["gadgets"])


def test_crossing_counts_demand_gadget_family():
    online = build_family_instance("random", {"n": 5}, seed=0)
    sched, _trace = run_onl(online)
    with pytest.raises(SchedError):
        gadget_crossing_counts(online, sched)


def _tiny_render_case():
    inst = assemble_instance(
        [Job(0, 2, (HALF,)), Job(1, 0, (HALF,)), Job(2, 4, (HALF,))],
        [(0, 2)],
        (Fraction(1),),
    )
    sched = Schedule({0: (0, 0), 1: (2, 3), 2: (2, 0)})
    return inst, sched


def test_gantt_text_layout():
    inst, sched = _tiny_render_case()
    text = gantt_text(inst, sched, width=16)
    lines = text.splitlines()
    assert lines[0] == "time 0..6 (3 jobs, width 16)"
    assert len(lines) == 4  # header + one row per job
    assert "#" in lines[1]
    assert "|" in lines[3]  # zero job renders as an instant marker


def test_gantt_rows_sorted_by_start():
    inst, sched = _tiny_render_case()
    lines = gantt_text(inst, sched, width=16).splitlines()[1:]
    starts = [int(line.split("@")[1].split()[0]) for line in lines]
    assert starts == sorted(starts)


def test_gantt_rejects_tiny_width():
    inst, sched = _tiny_render_case()
    with pytest.raises(SchedError):
        gantt_text(inst, sched, width=4)
