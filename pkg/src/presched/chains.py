"""Chain gadgets: alternating skinny/fat job chains and their schedule algebra.

A chain of type (m, i) is 2^(m-i) tuples, each a skinny job of duration 2^i
followed by a fat job.  Skinny jobs demand a tiny epsilon on every resource
(any number of them fit together); fat jobs demand the full budget on every
resource (nothing runs beside them).  Total skinny time per chain is 2^m
regardless of i, which is what makes mixed chain types hard to batch.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import inf

from .core import (
    Instance,
    Job,
    Schedule,
    check_feasible,
    makespan,
    predecessors,
    uniform_demand,
)
from .errors import SchedError, bad_params


@dataclass(frozen=True)
class ChainSpec:
    m: int
    i: int
    skinny_ids: tuple[int, ...]
    fat_ids: tuple[int, ...]
    skinny_demand: Fraction
    fat_duration: int

    @property
    def tuple_count(self) -> int:
        return len(self.skinny_ids)

    @property
    def source_id(self) -> int:
        return self.skinny_ids[0]

    @property
    def sink_id(self) -> int:
        return self.fat_ids[-1]

    @property
    def skinny_length(self) -> int:
        return 1 << self.i

    def job_ids(self) -> list[int]:
        out = []
        for s, f in zip(self.skinny_ids, self.fat_ids):
            out.extend((s, f))
        return out


def build_chain(
    m: int,
    i: int,
    epsilon: Fraction,
    fat_duration: int,
    id_base: int,
    budgets: tuple[Fraction, ...] = (Fraction(1),),
) -> tuple[ChainSpec, list[Job], list[tuple[int, int]]]:
    """Construct one chain of type (m, i); ids are id_base, id_base+1, ...

    Edges run skinny_k -> fat_k -> skinny_{k+1}.  Returns the spec, the jobs,
    and the internal edges.
    """
    if i < 0 or m < i:
        raise bad_params(f"need 0 <= i <= m, got m={m} i={i}")
    if fat_duration not in (0, 1):
        raise bad_params("fat_duration must be 0 or 1")
    tuples = 1 << (m - i)
    if not (0 < epsilon) or epsilon * (2 * tuples) >= 1:
        raise bad_params("epsilon must be positive and below 1/(chain job count)")
    d = len(budgets)
    skinny_dem = uniform_demand(d, epsilon)
    jobs: list[Job] = []
    edges: list[tuple[int, int]] = []
    skinny_ids: list[int] = []
    fat_ids: list[int] = []
    nid = id_base
    prev_fat = None
    for _ in range(tuples):
        skinny = Job(nid, 1 << i, skinny_dem)
        fat = Job(nid + 1, fat_duration, tuple(budgets))
        nid += 2
        jobs.extend((skinny, fat))
        skinny_ids.append(skinny.id)
        fat_ids.append(fat.id)
        edges.append((skinny.id, fat.id))
        if prev_fat is not None:
            edges.append((prev_fat, skinny.id))
        prev_fat = fat.id
    spec = ChainSpec(m, i, tuple(skinny_ids), tuple(fat_ids), epsilon, fat_duration)
    return spec, jobs, edges


def link_chains(first: ChainSpec, second: ChainSpec) -> tuple[int, int]:
    """Edge forcing ``second`` to start only after ``first`` completes."""
    if set(first.job_ids()) & set(second.job_ids()):
        raise SchedError("SELF_LINK", "cannot link a chain to itself")
    return (first.sink_id, second.source_id)


class RankAlloc:
    """Monotone per-instant rank counter for same-instant event ordering."""

    def __init__(self):
        self._next: dict[int, int] = {}

    def take(self, t: int) -> int:
        r = self._next.get(t, 0)
        self._next[t] = r + 1
        return r

    def observe(self, t: int, r: int) -> None:
        if r >= self._next.get(t, 0):
            self._next[t] = r + 1


def parallel_rounds(
    chains: list[ChainSpec], t0: int, ranks: RankAlloc
) -> tuple[dict[int, tuple[int, int]], int]:
    """Round-by-round schedule fragment for same-type chains, starting at t0.

    Round k runs the k-th skinny of every unfinished chain in parallel, then
    the k-th fats: at the boundary instant in rank order when fats are
    zero-duration, back to back otherwise.
    """
    if not chains:
        return {}, t0
    i = chains[0].i
    if any(c.i != i for c in chains):
        raise SchedError("MIXED_TYPES", "parallel rounds need a single skinny length")
    out: dict[int, tuple[int, int]] = {}
    t = t0
    rounds = max(c.tuple_count for c in chains)
    for k in range(rounds):
        active = [c for c in chains if c.tuple_count > k]
        for c in active:
            out[c.skinny_ids[k]] = (t, ranks.take(t))
        t += 1 << i
        for c in active:
            out[c.fat_ids[k]] = (t, ranks.take(t))
            t += c.fat_duration
    return out, t


def schedule_same_length_parallel(inst: Instance, chains: list[ChainSpec]) -> Schedule:
    """Feasible schedule running same-type chains side by side from time 0.

    With zero-duration fats the makespan is exactly max over chains of 2^m.
    """
    known = {v.id for v in inst.jobs}
    for c in chains:
        if not set(c.job_ids()) <= known:
            raise bad_params("chain references jobs outside the instance")
    assignments, _ = parallel_rounds(chains, 0, RankAlloc())
    return Schedule(assignments)


def _positive_batches(inst: Instance, sched: Schedule) -> list[tuple[int, list[Job]]]:
    by_start: dict[int, list[Job]] = {}
    for job in inst.positive_jobs():
        by_start.setdefault(sched.start(job.id), []).append(job)
    return sorted(by_start.items())


def is_sequential(inst: Instance, sched: Schedule) -> bool:
    """True when no job starts while an earlier-started job is still running."""
    horizon = -inf
    for s, batch in _positive_batches(inst, sched):
        if horizon > s:
            return False
        horizon = max(horizon, *(s + j.duration for j in batch))
    return True


def _require_feasible(inst: Instance, sched: Schedule) -> None:
    report = check_feasible(inst, sched)
    if not report.feasible:
        raise SchedError("INFEASIBLE_INPUT", f"schedule is not feasible: {report.violations[:3]}")


def normalize_sequential(inst: Instance, sched: Schedule) -> Schedule:
    """Pull starts back until no job begins while another one is running.

    Only skinny jobs can start mid-run of another job, and their fat
    predecessors are always done by the earlier start, so each pull stays
    feasible.  The makespan never increases.
    """
    _require_feasible(inst, sched)
    assignments = dict(sched.assignments)
    jm = inst.job_map()
    ranks = RankAlloc()
    for vid, (t, r) in assignments.items():
        ranks.observe(t, r)

    while True:
        intervals = sorted(
            (assignments[v.id][0], v.id) for v in inst.positive_jobs()
        )
        best_start, best_finish = 0, -inf
        moved = False
        k = 0
        while k < len(intervals):
            s = intervals[k][0]
            group = []
            while k < len(intervals) and intervals[k][0] == s:
                group.append(intervals[k][1])
                k += 1
            if best_finish > s:
                for vid in group:
                    assignments[vid] = (best_start, ranks.take(best_start))
                moved = True
                break
            for vid in group:
                f = s + jm[vid].duration
                if f > best_finish:
                    best_start, best_finish = s, f
        if not moved:
            return Schedule(assignments)


def batch_same_length(inst: Instance, sched: Schedule) -> Schedule:
    """Restage a sequential schedule so each parallel group shares one length.

    Each original batch is replayed in descending-length stages; every group
    then holds jobs of a single duration, and the batch span at most doubles,
    so the overall makespan is at most twice the input's.
    """
    _require_feasible(inst, sched)
    if not is_sequential(inst, sched):
        raise SchedError("NOT_NORMALIZED", "input schedule must be sequential")
    jm = inst.job_map()
    preds = predecessors(inst)
    out: dict[int, tuple[int, int]] = {}
    ranks = RankAlloc()
    done: set[int] = set()
    pending_zero = sorted(
        (sched.assignments[z.id], z.id) for z in inst.zero_jobs()
    )

    def fire_zeros(t: int) -> None:
        fired = True
        while fired:
            fired = False
            for key, zid in list(pending_zero):
                if preds[zid] <= done:
                    out[zid] = (t, ranks.take(t))
                    done.add(zid)
                    pending_zero.remove((key, zid))
                    fired = True

    t = 0
    for _, batch in _positive_batches(inst, sched):
        fire_zeros(t)
        for length in sorted({j.duration for j in batch}, reverse=True):
            stage = sorted(j.id for j in batch if j.duration == length)
            for vid in stage:
                if not preds[vid] <= done:
                    raise SchedError("INFEASIBLE_INPUT", f"job {vid} staged before its parents")
                out[vid] = (t, ranks.take(t))
            t += length
            done.update(stage)
            fire_zeros(t)
    fire_zeros(t)
    if len(out) != len(inst.jobs):
        raise SchedError("INFEASIBLE_INPUT", "restaging left jobs unplaced")
    return Schedule(out)


def wave_peaks(inst: Instance, sched: Schedule) -> list[int]:
    """Longest job length per start wave of a sequential schedule.

    Wave j is the set of jobs sharing the j-th distinct start instant; the
    sum of peaks never exceeds the makespan because waves do not overlap.
    """
    if not is_sequential(inst, sched):
        raise SchedError("NOT_NORMALIZED", "wave peaks need a sequential schedule")
    return [max(j.duration for j in batch) for _, batch in _positive_batches(inst, sched)]


def mixed_type_lower_bound(types: list[tuple[int, int]]) -> int:
    """Makespan lower bound for one chain per distinct type: ceil(sum(2^m) / 2).

    Any schedule finishing a type-(m, i) chain must start its skinnies in
    2^(m-i) distinct waves of peak >= 2^i; charging each wave peak at most
    twice covers every chain's 2^m total.
    """
    seen = set()
    for m, i in types:
        if i < 0 or m < i:
            raise bad_params(f"invalid chain type (m={m}, i={i})")
        if i in seen:
            raise SchedError("DUPLICATE_TYPE", f"skinny length 2^{i} appears twice")
        seen.add(i)
    total = sum(1 << m for m, _ in types)
    return (total + 1) // 2


def chain_instance(
    groups: list[tuple[ChainSpec, list[Job], list[tuple[int, int]]]],
    extra_edges: list[tuple[int, int]] = (),
    budgets: tuple[Fraction, ...] = (Fraction(1),),
) -> Instance:
    """Assemble chains plus linking edges into one instance."""
    jobs: list[Job] = []
    edges: list[tuple[int, int]] = []
    specs: list[ChainSpec] = []
    for spec, js, es in groups:
        specs.append(spec)
        jobs.extend(js)
        edges.extend(es)
    edges.extend(extra_edges)
    return Instance(tuple(jobs), frozenset(edges), tuple(budgets), tuple(specs))


def chain_completion_time(sched: Schedule, spec: ChainSpec, fat_duration: int) -> tuple[int, int]:
    """(time, rank) completion key of a chain's sink job."""
    s, r = sched.assignments[spec.sink_id]
    return (s + fat_duration, r)


__all__ = [
    "ChainSpec",
    "RankAlloc",
    "batch_same_length",
    "build_chain",
    "chain_instance",
    "is_sequential",
    "link_chains",
    "makespan",
    "mixed_type_lower_bound",
    "normalize_sequential",
    "parallel_rounds",
    "schedule_same_length_parallel",
    "wave_peaks",
]
