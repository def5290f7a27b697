"""Competitive-ratio experiment harness over the instance families.

Every run pairs a scheduler's makespan with a family baseline: the known
offline construction for the adversarial families, an exact optimum or a
certified lower bound for random DAGs.  All emitted schedules are
re-checked for feasibility before a row is recorded.
"""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .baselines import (
    brute_force_optimal,
    gadget_offline_schedule,
    greedy_killer_offline_schedule,
    multiresource_offline_schedule,
    run_greedy,
)
from .chains import chain_completion_time
from .core import (
    Instance,
    Schedule,
    check_feasible,
    makespan,
    round_durations_pow2,
)
from .errors import SchedError, bad_params
from .generators import (
    OnlineInstance,
    as_online,
    gen_greedy_killer,
    gen_multiresource_lb,
    gen_online_lb_gadget,
    gen_random_dag,
)
from .onl import opt_lower_bound, run_onl

CSV_COLUMNS = (
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


@dataclass(frozen=True)
class RunRow:
    family: str
    m: int
    d: int
    n: int
    seed: int
    scheduler: str
    makespan: int
    baseline: Fraction
    ratio: float


@dataclass(frozen=True)
class Aggregate:
    scheduler: str
    m: int
    d: int
    n: int
    mean_ratio: float
    std_ratio: float
    runs: int


@dataclass
class ExperimentReport:
    family: str
    grid: list[dict]
    trials: int
    schedulers: tuple[str, ...]
    rows: list[RunRow]
    aggregates: list[Aggregate]


def build_family_instance(
    family: str, point: Mapping, seed: int
) -> OnlineInstance:
    """One seeded instance of a named family at a grid point."""
    try:
        return _build_family_instance(family, point, seed)
    except KeyError as exc:
        raise bad_params(f"family {family!r} needs parameter {exc.args[0]!r}")


def _build_family_instance(
    family: str, point: Mapping, seed: int
) -> OnlineInstance:
    if family == "gadget":
        return gen_online_lb_gadget(
            m=int(point["m"]),
            num_gadgets=point.get("num_gadgets"),
            seed=seed,
            fat_duration=int(point.get("fat_duration", 1)),
        )
    if family == "multiresource":
        return gen_multiresource_lb(d=int(point["d"]), m=int(point["m"]), seed=seed)
    if family == "greedy-killer":
        return gen_greedy_killer(n=int(point["n"]))
    if family == "random":
        inst = gen_random_dag(
            n=int(point["n"]),
            edge_prob=float(point.get("edge_prob", 0.3)),
            max_dur=int(point.get("max_dur", 8)),
            d=int(point.get("d", 1)),
            seed=seed,
        )
        return as_online(inst, "random", seed=seed, **{k: point[k] for k in point})
    raise bad_params(f"unknown family {family!r}")


def _baseline(online: OnlineInstance) -> Fraction:
    family = online.meta["family"]
    inst = online.instance
    if family == "gadget":
        sched = gadget_offline_schedule(online)
    elif family == "multiresource":
        sched = multiresource_offline_schedule(online)
    elif family == "greedy-killer":
        sched = greedy_killer_offline_schedule(online)
    else:
        try:
            value, bsched = brute_force_optimal(inst)
            report = check_feasible(inst, bsched)
            if not report.feasible:
                raise SchedError(
                    "INFEASIBLE_INPUT", "exact baseline schedule failed its check"
                )
            return Fraction(value)
        except SchedError as err:
            if err.code != "TOO_LARGE":
                raise
            _, trace = run_onl(online)
            bound = opt_lower_bound(round_durations_pow2(inst), trace)
            return max(bound, Fraction(1))
    report = check_feasible(inst, sched)
    if not report.feasible:
        raise SchedError(
            "INFEASIBLE_INPUT", f"{family} baseline schedule failed its check"
        )
    return Fraction(makespan(inst, sched))


def _run_scheduler(
    name: str, online: OnlineInstance
) -> tuple[int, Instance, Schedule]:
    # returns (makespan, instance the schedule must satisfy, schedule); the
    # online algorithm commits to rounded durations, so it is checked there
    if name == "onl":
        sched, trace = run_onl(online)
        return trace.makespan, round_durations_pow2(online.instance), sched
    if name == "greedy":
        sched, log = run_greedy(online)
        return log.makespan, online.instance, sched
    raise bad_params(f"unknown scheduler {name!r}")


def experiment_competitive(
    family: str,
    grid: Sequence[Mapping],
    schedulers: Sequence[str] = ("onl",),
    trials: int = 10,
    seed_base: int = 0,
) -> ExperimentReport:
    """Run schedulers across a parameter grid, one seeded instance per trial.

    A row is fully determined by (family, grid point, seed, scheduler); the
    baseline depends on the instance alone, so ratios across schedulers are
    directly comparable.
    """
    if trials < 1:
        raise bad_params("trials must be >= 1")
    if not grid:
        raise bad_params("grid must contain at least one point")
    rows: list[RunRow] = []
    for point in grid:
        for k in range(trials):
            seed = seed_base + k
            online = build_family_instance(family, point, seed)
            inst = online.instance
            base = _baseline(online)
            for name in schedulers:
                span, target, sched = _run_scheduler(name, online)
                report = check_feasible(target, sched)
                if not report.feasible:
                    raise SchedError(
                        "INFEASIBLE_INPUT",
                        f"{name} emitted an infeasible schedule"
                        f" ({family}, seed {seed})",
                    )
                rows.append(
                    RunRow(
                        family=family,
                        m=int(point.get("m", 0)),
                        d=inst.d,
                        n=len(inst.jobs),
                        seed=seed,
                        scheduler=name,
                        makespan=span,
                        baseline=base,
                        ratio=float(Fraction(span) / base),
                    )
                )
    return ExperimentReport(
        family=family,
        grid=[dict(p) for p in grid],
        trials=trials,
        schedulers=tuple(schedulers),
        rows=rows,
        aggregates=_aggregate(rows),
    )


def _aggregate(rows: Sequence[RunRow]) -> list[Aggregate]:
    groups: dict[tuple[str, int, int, int], list[float]] = {}
    for r in rows:
        groups.setdefault((r.scheduler, r.m, r.d, r.n), []).append(r.ratio)
    out = []
    for (name, m, d, n), ratios in sorted(groups.items()):
        out.append(
            Aggregate(
                scheduler=name,
                m=m,
                d=d,
                n=n,
                mean_ratio=statistics.fmean(ratios),
                std_ratio=statistics.stdev(ratios) if len(ratios) > 1 else 0.0,
                runs=len(ratios),
            )
        )
    return out


def to_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in report.rows:
        base = (
            str(int(r.baseline))
            if r.baseline.denominator == 1
            else f"{float(r.baseline):.6g}"
        )
        writer.writerow(
            [r.family, r.m, r.d, r.n, r.seed, r.scheduler, r.makespan, base, f"{r.ratio:.6g}"]
        )
    return buf.getvalue()


def gadget_crossing_counts(online: OnlineInstance, sched: Schedule) -> list[int]:
    """Chains of each gadget finished by the time its blocking sink is done.

    The blocking chain counts itself, so entries are at least 1; the
    adversarial construction is working when a constant fraction of each
    gadget's chains is already through at the unlock instant.
    """
    meta = online.meta
    if meta.get("family") != "gadget" or "gadgets" not in meta:
        raise SchedError("MISSING_METADATA", "gadget structure metadata required")
    fat = meta["params"]["fat_duration"]
    chains = online.instance.chains
    counts: list[int] = []
    for g in meta["gadgets"]:
        gate = chain_completion_time(sched, chains[g["blocking"]], fat)
        counts.append(
            sum(
                1
                for ci in g["chains"]
                if chain_completion_time(sched, chains[ci], fat) <= gate
            )
        )
    return counts


def gantt_text(inst: Instance, sched: Schedule, width: int = 64) -> str:
    """Fixed-width text chart of a schedule, one row per job.

    Zero-duration jobs render as a single marker at their instant; rows are
    ordered by start, rank, then id.
    """
    if width < 8:
        raise bad_params("width must be >= 8")
    total = makespan(inst, sched)
    span = max(total, 1)
    jm = inst.job_map()
    lines = [f"time 0..{total} ({len(inst.jobs)} jobs, width {width})"]
    for vid, (s, _) in sorted(
        sched.assignments.items(), key=lambda kv: (kv[1], kv[0])
    ):
        job = jm[vid]
        a = round(s * width / span)
        if job.duration == 0:
            bar = "." * a + "|"
        else:
            b = max(a + 1, round((s + job.duration) * width / span))
            bar = "." * a + "#" * (b - a)
        lines.append(f"{vid:>6} @{s:<6} {bar}")
    return "\n".join(lines) + "\n"


__all__ = [
    "Aggregate",
    "CSV_COLUMNS",
    "ExperimentReport",
    "RunRow",
    "build_family_instance",
    "experiment_competitive",
    "gadget_crossing_counts",
    "gantt_text",
    "to_csv",
]
