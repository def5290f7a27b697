"""Level-based online scheduler and its certified bounds.

Durations are rounded up to powers of two on arrival.  Every revealed job v
gets a level: the smallest positive multiple of its duration at or above
max over parents of (level(p) + duration(p)), with 1 for roots.  Levels are
executed in increasing order; within a level, jobs are packed greedily
(longest duration first) and re-packed at every completion, which keeps each
level's span within twice its work density plus one job length.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    Instance,
    Job,
    Schedule,
    round_durations_pow2,
    work,
)
from .errors import SchedError, bad_params
from .generators import OnlineInstance
from .simulate import SchedulerView, SimLog, simulate_online


def level_cap(i: int) -> int:
    """Largest power of two dividing i (e.g. 32 -> 32, 33 -> 1, 28 -> 4)."""
    if i < 1:
        raise SchedError("ZERO_INPUT", "levels are positive integers")
    return i & (-i)


def _is_pow2(x: int) -> bool:
    return x >= 1 and (x & (x - 1)) == 0


def assign_level(duration: int, parents: Iterable[tuple[int | None, int]]) -> int:
    """Level for a job of the given (power-of-two) duration.

    ``parents`` holds (level, duration) pairs of all finished predecessors;
    roots pass an empty iterable and anchor at 1.
    """
    if not _is_pow2(duration):
        raise bad_params(f"duration {duration} is not a positive power of two")
    bound = 1
    for lvl, dur in parents:
        if lvl is None:
            raise SchedError("UNASSIGNED_PARENT", "parent has no level yet")
        bound = max(bound, lvl + dur)
    return ((bound + duration - 1) // duration) * duration


def _greedy_fit(
    candidates: list[Job], residual: list[Fraction]
) -> list[int]:
    """Start order: longest duration first, then id; take everything that fits."""
    picks = []
    for job in sorted(candidates, key=lambda j: (-j.duration, j.id)):
        if all(x <= r for x, r in zip(job.demand, residual)):
            picks.append(job.id)
            for j, x in enumerate(job.demand):
                residual[j] -= x
    return picks


def execute_working_set(
    jobs: Sequence[Job], budgets: tuple[Fraction, ...]
) -> tuple[dict[int, int], int]:
    """Greedy maximal packing of independent jobs; returns starts and the span.

    At time 0 and at every completion, every not-yet-started job that fits
    the residual budget is started (longest first).  No instant is left with
    a fitting unstarted job, which is what the span bound relies on.
    """
    for job in jobs:
        if any(x > b for x, b in zip(job.demand, budgets)):
            raise SchedError("JOB_EXCEEDS_BUDGET", f"job {job.id} can never fit the budget")
        if job.duration <= 0:
            raise SchedError("ZERO_DURATION", f"job {job.id} has no positive duration")
    jm = {j.id: j for j in jobs}
    starts: dict[int, int] = {}
    running: dict[int, int] = {}
    residual = list(budgets)
    t = 0
    remaining = list(jobs)
    while remaining or running:
        for vid in _greedy_fit(remaining, residual):
            starts[vid] = t
            running[vid] = t + jm[vid].duration
        remaining = [j for j in remaining if j.id not in starts]
        if not running:
            raise SchedError("JOB_EXCEEDS_BUDGET", "packing stalled")
        t = min(running.values())
        for vid in [v for v, f in running.items() if f == t]:
            del running[vid]
            for j, x in enumerate(jm[vid].demand):
                residual[j] += x
    return starts, t


class OnlScheduler:
    """Driver-facing implementation of the level discipline."""

    def __init__(self):
        self.level: dict[int, int] = {}
        self.current: int | None = None
        self.working: set[int] = set()

    def decide(self, view: SchedulerView) -> list[int]:
        for vid in sorted(view.revealed):
            if vid in self.level:
                continue
            job = view.revealed[vid]
            if job.duration == 0:
                raise SchedError("ZERO_DURATION", "online levels need positive durations")
            parents = [
                (self.level.get(p), view.revealed[p].duration)
                for p in view.known_edges[vid]
            ]
            lvl = assign_level(job.duration, parents)
            if self.current is not None and lvl <= self.current:
                raise SchedError("REVEAL_VIOLATION", f"job {vid} revealed into a closed level")
            self.level[vid] = lvl

        if self.current is None or self.working <= view.finished:
            open_jobs = [v for v in view.revealed if v not in view.started]
            if not open_jobs:
                return []
            nxt = min(self.level[v] for v in open_jobs)
            self.current = nxt
            self.working = {v for v in open_jobs if self.level[v] == nxt}

        candidates = [
            view.revealed[v] for v in self.working if v not in view.started
        ]
        return _greedy_fit(candidates, list(view.residual))


@dataclass(frozen=True)
class LevelStats:
    level: int
    jobs: tuple[int, ...]
    tau: int
    work: tuple[Fraction, ...]


@dataclass(frozen=True)
class OnlTrace:
    levels: tuple[LevelStats, ...]
    l_max: int
    l_end: int
    t_max: int
    makespan: int

    def level_of(self) -> dict[int, int]:
        out = {}
        for stats in self.levels:
            for v in stats.jobs:
                out[v] = stats.level
        return out


def run_onl(source: OnlineInstance | Instance) -> tuple[Schedule, OnlTrace]:
    """Run the online algorithm; the schedule is for the rounded instance.

    Rounding durations up to powers of two at reveal keeps the run online;
    the emitted schedule is feasible for the original instance as well since
    true durations are never longer.
    """
    raw = source.instance if isinstance(source, OnlineInstance) else source
    inst = round_durations_pow2(raw)
    scheduler = OnlScheduler()
    sched, log = simulate_online(inst, scheduler)
    trace = _build_trace(inst, sched, scheduler.level)
    return sched, trace


def _build_trace(inst: Instance, sched: Schedule, level: dict[int, int]) -> OnlTrace:
    jm = inst.job_map()
    by_level: dict[int, list[int]] = {}
    for vid, lvl in level.items():
        by_level.setdefault(lvl, []).append(vid)
    stats = []
    cursor = 0
    for lvl in sorted(by_level):
        members = sorted(by_level[lvl])
        start = min(sched.start(v) for v in members)
        end = max(sched.start(v) + jm[v].duration for v in members)
        if start != cursor:
            raise SchedError("REVEAL_VIOLATION", "levels did not run back to back")
        cursor = end
        stats.append(
            LevelStats(
                lvl,
                tuple(members),
                end - start,
                tuple(work(inst, members, j) for j in range(inst.d)),
            )
        )
    l_max = max(level.values(), default=0)
    l_end = max((lvl + jm[v].duration for v, lvl in level.items()), default=0)
    t_max = max((jm[v].duration for v in level), default=0)
    return OnlTrace(tuple(stats), l_max, l_end, t_max, cursor)


def sum_cap_bound(trace: OnlTrace, n_jobs: int) -> tuple[int, int, int]:
    """(lhs, via-job-count rhs, via-t_max rhs) for the per-level overhead sum.

    lhs = sum over occupied levels of min(t_max, level_cap); both right-hand
    sides dominate it: 2 * (ceil(log2 n) + 1) * l_max counts distinct cap
    values an n-job run can occupy, and 2 * l_max * (log2 t_max + 1) uses the
    periodicity of caps below t_max.
    """
    if n_jobs < 1:
        raise SchedError("ZERO_INPUT", "need at least one job")
    lhs = sum(min(trace.t_max, level_cap(s.level)) for s in trace.levels)
    ceil_log_n = (n_jobs - 1).bit_length()
    rhs_log_v = 2 * (ceil_log_n + 1) * trace.l_max
    rhs_log_tmax = 2 * trace.l_max * trace.t_max.bit_length()
    return lhs, rhs_log_v, rhs_log_tmax


def onl_makespan_bound(inst: Instance, trace: OnlTrace) -> Fraction:
    """Certified global bound: 2 * sum_j work_j(V)/r_j + sum of level overheads."""
    all_ids = [v.id for v in inst.jobs]
    dense = sum(
        (work(inst, all_ids, j) / inst.budgets[j] for j in range(inst.d)), Fraction(0)
    )
    overhead = sum(min(trace.t_max, level_cap(s.level)) for s in trace.levels)
    return 2 * dense + overhead


def level_time_bound(inst: Instance, stats: LevelStats, trace: OnlTrace) -> Fraction:
    """Per-level bound: tau_i <= 2 * sum_j work_j(W_i)/r_j + min(t_max, cap_i)."""
    dense = sum(
        (w / r for w, r in zip(stats.work, inst.budgets)), Fraction(0)
    )
    return 2 * dense + min(trace.t_max, level_cap(stats.level))


def opt_lower_bound(inst: Instance, trace: OnlTrace) -> Fraction:
    """Lower bound on the optimal makespan of the (power-of-two) instance.

    Combines the resource-density bound sum_j work_j(V)/r_j over d with the
    level geometry: depth(v) >= (level(v) - duration(v)) / 2, so the critical
    path reaches at least max(level + duration)/2 - 1.
    """
    all_ids = [v.id for v in inst.jobs]
    density = sum(
        (work(inst, all_ids, j) / inst.budgets[j] for j in range(inst.d)), Fraction(0)
    ) / inst.d
    path = Fraction(trace.l_end, 2) - 1
    return max(density, path)
