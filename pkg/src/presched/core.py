"""Core model: jobs, instances, schedules, and exact feasibility checking.

Time is integer valued.  Demands and budgets are exact rationals
(``fractions.Fraction``); no floats enter any feasibility decision.

Zero-duration jobs are first-class.  A schedule assigns every job a start
instant and a rank; ranks order same-instant events:

* precedence over an edge (u, v) holds when finish(u) < start(v), or
  finish(u) == start(v) and (duration(u) > 0 or rank(u) < rank(v));
* positive-duration jobs overlapping an instant t (start <= t < finish)
  must jointly fit the budget on every resource;
* a zero-duration job at instant t additionally fits against the
  positive-duration jobs strictly straddling t (start < t < finish);
  zero-duration jobs never conflict with one another.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import SchedError, bad_params

ZERO = Fraction(0)


@dataclass(frozen=True)
class Job:
    id: int
    duration: int
    demand: tuple[Fraction, ...]

    def __post_init__(self):
        if self.duration < 0:
            raise bad_params(f"job {self.id}: negative duration")
        if any(x < 0 for x in self.demand):
            raise bad_params(f"job {self.id}: negative demand")


@dataclass(frozen=True)
class Instance:
    """A precedence DAG of jobs sharing d renewable resources.

    ``chains`` optionally records gadget structure (see chains.ChainSpec);
    it never affects feasibility, only construction-aware tooling.
    """

    jobs: tuple[Job, ...]
    edges: frozenset[tuple[int, int]]
    budgets: tuple[Fraction, ...]
    chains: tuple = ()

    @property
    def d(self) -> int:
        return len(self.budgets)

    def job_map(self) -> dict[int, Job]:
        return {v.id: v for v in self.jobs}

    def positive_jobs(self) -> list[Job]:
        return [v for v in self.jobs if v.duration > 0]

    def zero_jobs(self) -> list[Job]:
        return [v for v in self.jobs if v.duration == 0]


@dataclass(frozen=True)
class Schedule:
    """Start instant and rank per job id."""

    assignments: dict[int, tuple[int, int]] = field(default_factory=dict)

    def start(self, job_id: int) -> int:
        return self.assignments[job_id][0]

    def rank(self, job_id: int) -> int:
        return self.assignments[job_id][1]


@dataclass(frozen=True)
class Violation:
    kind: str  # PRECEDENCE | RESOURCE | MISSING_JOB
    jobs: tuple[int, ...]
    instant: int | None = None


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    violations: tuple[Violation, ...]


def graph_predecessors(
    nodes: Iterable[int], edges: Iterable[tuple[int, int]]
) -> dict[int, set[int]]:
    preds: dict[int, set[int]] = {v: set() for v in nodes}
    for u, v in edges:
        preds[v].add(u)
    return preds


def graph_successors(
    nodes: Iterable[int], edges: Iterable[tuple[int, int]]
) -> dict[int, set[int]]:
    succs: dict[int, set[int]] = {v: set() for v in nodes}
    for u, v in edges:
        succs[u].add(v)
    return succs


def predecessors(inst: Instance) -> dict[int, set[int]]:
    return graph_predecessors((v.id for v in inst.jobs), inst.edges)


def successors(inst: Instance) -> dict[int, set[int]]:
    return graph_successors((v.id for v in inst.jobs), inst.edges)


def topological_order(nodes: Iterable[int], edges: Iterable[tuple[int, int]]) -> list[int]:
    """Kahn order; raises CYCLE when the edge set is not a DAG."""
    nodes = list(nodes)
    indeg = {v: 0 for v in nodes}
    succs: dict[int, list[int]] = {v: [] for v in nodes}
    for u, v in edges:
        indeg[v] += 1
        succs[u].append(v)
    frontier = sorted(v for v in nodes if indeg[v] == 0)
    order: list[int] = []
    while frontier:
        v = frontier.pop()
        order.append(v)
        for w in succs[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                frontier.append(w)
    if len(order) != len(nodes):
        raise SchedError("CYCLE", "precedence relation contains a cycle")
    return order


def validate_instance(inst: Instance) -> None:
    """Structural validation: ids, edge endpoints, demands vs budgets, acyclicity."""
    ids = [v.id for v in inst.jobs]
    if len(ids) != len(set(ids)):
        raise bad_params("duplicate job ids")
    if any(b < 0 for b in inst.budgets):
        raise bad_params("negative budget")
    known = set(ids)
    for u, v in inst.edges:
        if u not in known or v not in known:
            raise SchedError("MISSING_JOB", f"edge ({u}, {v}) references unknown job")
        if u == v:
            raise SchedError("CYCLE", f"self-loop on job {u}")
    for job in inst.jobs:
        if len(job.demand) != inst.d:
            raise bad_params(f"job {job.id}: demand vector length != d")
        for j, x in enumerate(job.demand):
            if x > inst.budgets[j]:
                raise SchedError(
                    "RESOURCE", f"job {job.id} demands {x} > budget {inst.budgets[j]} on resource {j}"
                )
    topological_order(ids, inst.edges)


def makespan(inst: Instance, sched: Schedule) -> int:
    jm = inst.job_map()
    if not sched.assignments:
        return 0
    return max(s + jm[v].duration for v, (s, _) in sched.assignments.items() if v in jm)


class _UsageSweep:
    """Prefix sums of positive-job demand over time, one array per resource."""

    def __init__(self, inst: Instance, sched: Schedule):
        d = inst.d
        jm = inst.job_map()
        starts: list[tuple[int, tuple[Fraction, ...]]] = []
        finishes: list[tuple[int, tuple[Fraction, ...]]] = []
        for vid, (s, _) in sched.assignments.items():
            job = jm[vid]
            if job.duration > 0:
                starts.append((s, job.demand))
                finishes.append((s + job.duration, job.demand))
        starts.sort(key=lambda e: e[0])
        finishes.sort(key=lambda e: e[0])
        self.start_times = [t for t, _ in starts]
        self.finish_times = [t for t, _ in finishes]
        self.start_prefix = _prefix(starts, d)
        self.finish_prefix = _prefix(finishes, d)

    def straddling(self, t: int) -> tuple[Fraction, ...]:
        """Total demand of positive jobs with start < t < finish."""
        a = bisect_left(self.start_times, t)
        b = bisect_right(self.finish_times, t)
        return tuple(sa - fb for sa, fb in zip(self.start_prefix[a], self.finish_prefix[b]))

    def overlapping(self, t: int) -> tuple[Fraction, ...]:
        """Total demand of positive jobs with start <= t < finish."""
        a = bisect_right(self.start_times, t)
        b = bisect_right(self.finish_times, t)
        return tuple(sa - fb for sa, fb in zip(self.start_prefix[a], self.finish_prefix[b]))


def _prefix(events: list[tuple[int, tuple[Fraction, ...]]], d: int) -> list[tuple[Fraction, ...]]:
    acc = [ZERO] * d
    out = [tuple(acc)]
    for _, dem in events:
        acc = [a + x for a, x in zip(acc, dem)]
        out.append(tuple(acc))
    return out


def check_feasible(inst: Instance, sched: Schedule) -> FeasibilityReport:
    """Exact feasibility of a schedule against an instance.

    Reports MISSING_JOB for unassigned jobs, PRECEDENCE per violated edge,
    and RESOURCE for budget overflows under the interval rules above.
    """
    violations: list[Violation] = []
    jm = inst.job_map()
    missing = [v.id for v in inst.jobs if v.id not in sched.assignments]
    if missing:
        violations.extend(Violation("MISSING_JOB", (v,)) for v in sorted(missing))
        return FeasibilityReport(False, tuple(violations))

    seen_rank: dict[tuple[int, int], int] = {}
    for job in inst.jobs:
        if job.duration == 0:
            key = sched.assignments[job.id]
            if key in seen_rank:
                violations.append(Violation("PRECEDENCE", (seen_rank[key], job.id), key[0]))
            else:
                seen_rank[key] = job.id

    for u, v in sorted(inst.edges):
        su, ru = sched.assignments[u]
        sv, rv = sched.assignments[v]
        fu = su + jm[u].duration
        ok = fu < sv or (fu == sv and (jm[u].duration > 0 or ru < rv))
        if not ok:
            violations.append(Violation("PRECEDENCE", (u, v), sv))

    sweep = _UsageSweep(inst, sched)
    for t in sorted({sched.assignments[v.id][0] for v in inst.jobs if v.duration > 0}):
        usage = sweep.overlapping(t)
        if any(x > b for x, b in zip(usage, inst.budgets)):
            active = tuple(
                sorted(
                    vid
                    for vid, (s, _) in sched.assignments.items()
                    if jm[vid].duration > 0 and s <= t < s + jm[vid].duration
                )
            )
            violations.append(Violation("RESOURCE", active, t))

    for job in inst.jobs:
        if job.duration == 0:
            t = sched.assignments[job.id][0]
            base = sweep.straddling(t)
            if any(x + y > b for x, y, b in zip(base, job.demand, inst.budgets)):
                violations.append(Violation("RESOURCE", (job.id,), t))

    return FeasibilityReport(not violations, tuple(violations))


def inflate_zero_jobs(inst: Instance, epsilon: Fraction) -> Instance:
    """Rescale durations so zero-duration jobs take one unit.

    Positive durations are multiplied by |V|/epsilon (which must be an
    integer); zero durations become 1.  Feasible schedules map across in
    both directions, so optima scale exactly.
    """
    if not (0 < epsilon <= 1):
        raise bad_params("epsilon must lie in (0, 1]")
    n = len(inst.jobs)
    scale = Fraction(n, 1) / epsilon
    if scale.denominator != 1:
        raise bad_params("|V|/epsilon must be an integer")
    k = scale.numerator
    jobs = tuple(
        Job(v.id, v.duration * k if v.duration > 0 else 1, v.demand) for v in inst.jobs
    )
    return Instance(jobs, inst.edges, inst.budgets, inst.chains)


def next_pow2(x: int) -> int:
    if x < 1:
        raise bad_params("next_pow2 needs a positive integer")
    return 1 << (x - 1).bit_length()


def round_durations_pow2(inst: Instance) -> Instance:
    """Round every duration up to the next power of two (at most doubling)."""
    for v in inst.jobs:
        if v.duration == 0:
            raise SchedError("ZERO_DURATION", f"job {v.id} has duration 0")
    jobs = tuple(Job(v.id, next_pow2(v.duration), v.demand) for v in inst.jobs)
    return Instance(jobs, inst.edges, inst.budgets, inst.chains)


def transitive_reduction(
    nodes: Iterable[int], edges: Iterable[tuple[int, int]]
) -> frozenset[tuple[int, int]]:
    """Unique minimal edge set with the reachability of ``edges`` (DAG only).

    An edge (u, v) is dropped exactly when v stays reachable from u through
    some other direct child of u.
    """
    nodes = list(nodes)
    edge_set = set(edges)
    order = topological_order(nodes, edge_set)
    idx = {v: i for i, v in enumerate(nodes)}
    children: dict[int, list[int]] = {v: [] for v in nodes}
    for u, v in edge_set:
        children[u].append(v)
    reach: dict[int, int] = {}  # bitmask over idx
    for v in reversed(order):
        mask = 1 << idx[v]
        for w in children[v]:
            mask |= reach[w]
        reach[v] = mask
    kept = set()
    for u in nodes:
        for v in children[u]:
            via_other = any(
                (reach[w] >> idx[v]) & 1 for w in children[u] if w != v
            )
            if not via_other:
                kept.add((u, v))
    return frozenset(kept)


def work(inst: Instance, job_ids: Iterable[int], resource: int) -> Fraction:
    """Total resource-time area sum(demand[resource] * duration) over job_ids."""
    jm = inst.job_map()
    total = ZERO
    for vid in job_ids:
        job = jm[vid]
        total += job.demand[resource] * job.duration
    return total


def depth_profile(inst: Instance) -> dict[int, int]:
    """Duration-weighted depth: roots get 1, else 1 + heaviest path into the job.

    depth(v) = max over parents p of depth(p) + duration(p), with a virtual
    zero-duration source of depth 1 feeding every root.
    """
    preds = predecessors(inst)
    jm = inst.job_map()
    depth: dict[int, int] = {}
    for v in topological_order([j.id for j in inst.jobs], inst.edges):
        ps = preds[v]
        depth[v] = 1 if not ps else max(depth[p] + jm[p].duration for p in ps)
    return depth


def critical_path_end(inst: Instance) -> int:
    """max over jobs of depth(v) - 1 + duration(v): a lower bound on any makespan."""
    if not inst.jobs:
        return 0
    depth = depth_profile(inst)
    jm = inst.job_map()
    return max(depth[v] - 1 + jm[v].duration for v in depth)


def uniform_demand(d: int, x: Fraction) -> tuple[Fraction, ...]:
    return tuple(x for _ in range(d))


def assemble_instance(
    jobs: Sequence[Job],
    edges: Iterable[tuple[int, int]],
    budgets: Sequence[Fraction],
    chains: tuple = (),
) -> Instance:
    inst = Instance(tuple(jobs), frozenset(edges), tuple(budgets), chains)
    validate_instance(inst)
    return inst
