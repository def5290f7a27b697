"""Baseline schedulers and exact oracles.

Three kinds of reference points: a maximal greedy online scheduler, exact
brute-force solvers for small instances of each problem, and hand-built
offline schedules for the generator families (whose structure is recovered
from the generator metadata).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .chains import RankAlloc, parallel_rounds
from .core import (
    Instance,
    Job,
    Schedule,
    graph_predecessors,
    graph_successors,
    topological_order,
    validate_instance,
)
from .errors import SchedError, bad_params
from .generators import OnlineInstance
from .simulate import SchedulerView, SimLog, simulate_online


def _fits(demand: Sequence[Fraction], room: Sequence[Fraction]) -> bool:
    return all(x <= r for x, r in zip(demand, room))


class GreedyScheduler:
    """Start everything that fits, in reveal order.

    Positive jobs are checked against the residual budget, zero-duration jobs
    only against the jobs straddling the instant.  The driver re-invokes the
    scheduler until a fixpoint, so the packing is maximal at every instant.
    """

    def decide(self, view: SchedulerView) -> list[int]:
        residual = list(view.residual)
        picks: list[int] = []
        for vid, job in view.revealed.items():
            if vid in view.started:
                continue
            if job.duration > 0:
                if _fits(job.demand, residual):
                    picks.append(vid)
                    for j, x in enumerate(job.demand):
                        residual[j] -= x
            else:
                if all(
                    x + s <= b
                    for x, s, b in zip(job.demand, view.straddle, view.budgets)
                ):
                    picks.append(vid)
        return picks


def run_greedy(source: OnlineInstance | Instance) -> tuple[Schedule, SimLog]:
    return simulate_online(source, GreedyScheduler())


# ---------------------------------------------------------------------------
# exact resource-scheduling oracle


def _zero_cascade(
    zero_ids: list[int],
    jm: dict[int, Job],
    preds: dict[int, set[int]],
    budgets: tuple[Fraction, ...],
    done: set[int],
    running: Iterable[tuple[int, int]],
) -> list[int]:
    """Fire every zero job that is ready and unblocked; returns firing order.

    A ready zero conflicts only with positives strictly straddling the
    instant, i.e. the running set.  Firing one can never hurt, so an optimal
    schedule exists that fires them all immediately.
    """
    straddle = [Fraction(0)] * len(budgets)
    for vid, _ in running:
        for j, x in enumerate(jm[vid].demand):
            straddle[j] += x
    room = [b - s for b, s in zip(budgets, straddle)]
    fired: list[int] = []
    changed = True
    while changed:
        changed = False
        for z in zero_ids:
            if z in done or not preds[z] <= done:
                continue
            if _fits(jm[z].demand, room):
                done.add(z)
                fired.append(z)
                changed = True
    return fired


def _fitting_subsets(
    ready: list[Job], room: list[Fraction]
) -> Iterable[tuple[int, ...]]:
    """All subsets of ready jobs whose joint demand fits the room."""
    out: list[tuple[int, ...]] = []

    def rec(k: int, room: list[Fraction], chosen: list[int]) -> None:
        if k == len(ready):
            out.append(tuple(chosen))
            return
        rec(k + 1, room, chosen)
        job = ready[k]
        if _fits(job.demand, room):
            chosen.append(job.id)
            rec(k + 1, [r - x for r, x in zip(room, job.demand)], chosen)
            chosen.pop()

    rec(0, room, [])
    return out


def brute_force_optimal(
    inst: Instance, limit: int = 9
) -> tuple[int, Schedule]:
    """Exact minimum makespan via A* over start decisions.

    It is enough to consider schedules where positives start at time 0 or at
    a completion, and zeros fire as early as possible; the search branches
    over every fitting subset of ready positives at each event.  The refusal
    threshold counts positive jobs only (zeros are forced moves).
    """
    validate_instance(inst)
    positives = [j for j in inst.jobs if j.duration > 0]
    if len(positives) > limit:
        raise SchedError(
            "TOO_LARGE", f"{len(positives)} positive jobs exceed the limit {limit}"
        )
    if len(inst.jobs) > 64:
        raise SchedError("TOO_LARGE", f"{len(inst.jobs)} jobs exceed the job cap 64")
    jm = inst.job_map()
    ids = sorted(jm)
    preds = graph_predecessors(ids, inst.edges)
    succs = graph_successors(ids, inst.edges)
    zero_ids = sorted(j.id for j in inst.jobs if j.duration == 0)
    order = topological_order(ids, inst.edges)
    tail: dict[int, int] = {}
    for v in reversed(order):
        tail[v] = jm[v].duration + max((tail[w] for w in succs[v]), default=0)
    succ_tail = {v: max((tail[w] for w in succs[v]), default=0) for v in ids}

    def heuristic(done: frozenset[int], running: frozenset[tuple[int, int]]) -> Fraction:
        running_ids = {vid for vid, _ in running}
        h = Fraction(0)
        for v in ids:
            if v not in done and v not in running_ids:
                h = max(h, Fraction(tail[v]))
        for vid, rem in running:
            h = max(h, Fraction(rem + succ_tail[vid]))
        for j in range(inst.d):
            load = Fraction(0)
            for v in ids:
                if v not in done and v not in running_ids:
                    load += jm[v].duration * jm[v].demand[j]
            for vid, rem in running:
                load += rem * jm[vid].demand[j]
            h = max(h, load / inst.budgets[j])
        return h

    done0: set[int] = set()
    fired0 = _zero_cascade(zero_ids, jm, preds, inst.budgets, done0, ())
    start_key = (frozenset(done0), frozenset())
    # parent: state -> (previous state, ((job, time, is_zero), ...))
    parent: dict[tuple, tuple] = {
        start_key: (None, tuple((z, 0, True) for z in fired0))
    }
    best = {start_key: 0}
    heap: list[tuple[Fraction, int, int, tuple]] = []
    seq = 0
    heapq.heappush(heap, (heuristic(*start_key), seq, 0, start_key))
    n_all = len(ids)

    while heap:
        f, _, g, key = heapq.heappop(heap)
        if g > best.get(key, g):
            continue
        done, running = key
        if len(done) == n_all:
            return g, _reconstruct(parent, key)
        running_ids = {vid for vid, _ in running}
        used = [Fraction(0)] * inst.d
        for vid, _ in running:
            for j, x in enumerate(jm[vid].demand):
                used[j] += x
        room = [b - u for b, u in zip(inst.budgets, used)]
        ready = [
            jm[p.id]
            for p in positives
            if p.id not in done and p.id not in running_ids and preds[p.id] <= done
        ]
        ready.sort(key=lambda j: j.id)
        for subset in _fitting_subsets(ready, room):
            new_running = set(running)
            new_running.update((p, jm[p].duration) for p in subset)
            if not new_running:
                continue
            delta = min(rem for _, rem in new_running)
            g2 = g + delta
            done2 = set(done)
            done2.update(vid for vid, rem in new_running if rem == delta)
            running2 = frozenset(
                (vid, rem - delta) for vid, rem in new_running if rem > delta
            )
            fired = _zero_cascade(zero_ids, jm, preds, inst.budgets, done2, running2)
            key2 = (frozenset(done2), running2)
            if best.get(key2, g2 + 1) <= g2:
                continue
            best[key2] = g2
            starts = tuple((p, g, False) for p in subset) + tuple(
                (z, g2, True) for z in fired
            )
            parent[key2] = (key, starts)
            seq += 1
            heapq.heappush(heap, (g2 + heuristic(key2[0], key2[1]), seq, g2, key2))
    raise SchedError("DEADLOCK", "search exhausted without finishing all jobs")


def _reconstruct(parent: dict, goal: tuple) -> Schedule:
    events: list[tuple[int, int, bool]] = []
    key = goal
    while key is not None:
        prev, starts = parent[key]
        events.extend(starts)
        key = prev
    by_time: dict[int, list[tuple[int, bool]]] = {}
    for vid, t, is_zero in events:
        by_time.setdefault(t, []).append((vid, is_zero))
    assignments: dict[int, tuple[int, int]] = {}
    for t, entries in by_time.items():
        rank = 0
        # zeros take the low ranks so zero -> positive edges meeting at this
        # instant are ordered correctly
        for vid, _ in sorted(entries, key=lambda e: not e[1]):
            assignments[vid] = (t, rank)
            rank += 1
    return Schedule(assignments)


# ---------------------------------------------------------------------------
# offline schedules for the generator families


def _require_family(online: OnlineInstance, family: str) -> dict:
    meta = online.meta
    if meta.get("family") != family:
        raise SchedError(
            "MISSING_METADATA", f"need metadata of the {family} family"
        )
    return meta


def gadget_offline_schedule(online: OnlineInstance) -> Schedule:
    """Short offline schedule for the blocking-chain gadget family.

    First all blocking chains run one after another (this releases every
    gadget), then for each skinny length the non-blocking chains of that
    length run side by side across all gadgets.
    """
    meta = _require_family(online, "gadget")
    specs = online.instance.chains
    ranks = RankAlloc()
    assignments: dict[int, tuple[int, int]] = {}
    t = 0
    for gadget in meta["gadgets"]:
        frag, t = parallel_rounds([specs[gadget["blocking"]]], t, ranks)
        assignments.update(frag)
    m = meta["params"]["m"]
    for i in range(1, m + 1):
        group = [
            specs[idx]
            for gadget in meta["gadgets"]
            for idx in gadget["chains"]
            if idx != gadget["blocking"] and specs[idx].i == i
        ]
        if group:
            frag, t = parallel_rounds(group, t, ranks)
            assignments.update(frag)
    return Schedule(assignments)


def multiresource_offline_schedule(online: OnlineInstance) -> Schedule:
    """Offline schedule of makespan d - 1 + m for the layered family.

    Blocking jobs run back to back in the first d - 1 slots; every other job
    then runs in diagonal rounds, one job per layer per slot (layers use
    disjoint resources, so a round is feasible).
    """
    meta = _require_family(online, "multiresource")
    blocking = list(meta["blocking"])
    blocked = set(blocking)
    d = meta["params"]["d"]
    assignments: dict[int, tuple[int, int]] = {}
    for idx, b in enumerate(blocking):
        assignments[b] = (idx, 0)
    for layer in meta["layers"]:
        k = 0
        for vid in layer:
            if vid in blocked:
                continue
            assignments[vid] = (d - 1 + k, 0)
            k += 1
    return Schedule(assignments)


def greedy_killer_offline_schedule(online: OnlineInstance) -> Schedule:
    """Offline schedule of makespan 3n - 1 for the greedy-killer family.

    The full-budget jobs take the even slots, their thin unlockers the odd
    slots in between, and all the long thin jobs run together at the end.
    """
    meta = _require_family(online, "greedy-killer")
    roles = meta["roles"]
    n = meta["params"]["n"]
    assignments: dict[int, tuple[int, int]] = {}
    for k, vid in enumerate(roles["a"]):
        assignments[vid] = (2 * k, 0)
    for k, vid in enumerate(roles["c"]):
        assignments[vid] = (2 * k + 1, 0)
    for k, vid in enumerate(roles["b"]):
        assignments[vid] = (2 * n - 1, k)
    return Schedule(assignments)


# ---------------------------------------------------------------------------
# shortest common supersequence


@dataclass(frozen=True)
class ScsInstance:
    """Shortest-common-supersequence input over the alphabet 1..rho."""

    rho: int
    sequences: tuple[tuple[int, ...], ...]


def is_supersequence(z: Sequence[int], sequences: Iterable[Sequence[int]]) -> bool:
    for seq in sequences:
        k = 0
        for c in z:
            if k < len(seq) and seq[k] == c:
                k += 1
        if k < len(seq):
            return False
    return True


def scs_brute_force(
    scs: ScsInstance, limit: int = 25
) -> tuple[int, tuple[int, ...]]:
    """Exact shortest common supersequence via A* over position vectors."""
    seqs = [tuple(s) for s in scs.sequences]
    if sum(len(s) for s in seqs) > limit:
        raise SchedError("TOO_LARGE", f"total length exceeds the limit {limit}")

    def heuristic(pos: tuple[int, ...]) -> int:
        return max((len(s) - p for s, p in zip(seqs, pos)), default=0)

    start = tuple(0 for _ in seqs)
    goal = tuple(len(s) for s in seqs)
    parent: dict[tuple[int, ...], tuple] = {start: (None, None)}
    best = {start: 0}
    heap = [(heuristic(start), 0, 0, start)]
    seq_no = 0
    while heap:
        f, _, g, pos = heapq.heappop(heap)
        if g > best.get(pos, g):
            continue
        if pos == goal:
            out: list[int] = []
            key = pos
            while parent[key][0] is not None:
                key, c = parent[key]
                out.append(c)
            return g, tuple(reversed(out))
        symbols = {seqs[k][p] for k, p in enumerate(pos) if p < len(seqs[k])}
        for c in sorted(symbols):
            nxt = tuple(
                p + 1 if p < len(seqs[k]) and seqs[k][p] == c else p
                for k, p in enumerate(pos)
            )
            g2 = g + 1
            if best.get(nxt, g2 + 1) <= g2:
                continue
            best[nxt] = g2
            parent[nxt] = (pos, c)
            seq_no += 1
            heapq.heappush(heap, (g2 + heuristic(nxt), seq_no, g2, nxt))
    raise SchedError("DEADLOCK", "supersequence search exhausted")


# ---------------------------------------------------------------------------
# loading-time scheduling


@dataclass
class LtsInstance:
    """Jobs pinned to machines; switching a machine on costs its loading time.

    A solution is a sequence of blocks, each running some jobs of a single
    machine; precedence must respect block order (same block is fine).
    """

    machines: tuple[tuple[int, int], ...]  # (machine id, loading time)
    jobs: dict[int, int]  # job id -> machine id
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def load_of(self, machine_id: int) -> int:
        for mid, load in self.machines:
            if mid == machine_id:
                return load
        raise SchedError("MISSING_JOB", f"unknown machine {machine_id}")


@dataclass(frozen=True)
class LtsSolution:
    blocks: tuple[tuple[int, tuple[int, ...]], ...]  # (machine id, job ids)


def lts_cost(lts: LtsInstance, solution: LtsSolution) -> int:
    return sum(lts.load_of(mid) for mid, _ in solution.blocks)


def validate_lts_solution(lts: LtsInstance, solution: LtsSolution) -> None:
    """Raise INVALID_SOLUTION unless the blocks form a feasible ordered plan.

    Blocks must partition the jobs, be machine-homogeneous, and respect
    precedence: a job may appear once all predecessors sit in earlier blocks
    or in its own block (same-machine jobs inside one block run
    consecutively, so in-block edges are fine).
    """
    seen: set[int] = set()
    known_machines = {mid for mid, _ in lts.machines}
    preds = graph_predecessors(sorted(lts.jobs), lts.edges)
    done: set[int] = set()
    for mid, members in solution.blocks:
        if mid not in known_machines:
            raise SchedError("INVALID_SOLUTION", f"block uses unknown machine {mid}")
        if not members:
            raise SchedError("INVALID_SOLUTION", "empty block")
        block = set(members)
        if len(block) != len(members):
            raise SchedError("INVALID_SOLUTION", "job repeated inside a block")
        for v in members:
            if v not in lts.jobs:
                raise SchedError("INVALID_SOLUTION", f"unknown job {v}")
            if v in seen:
                raise SchedError("INVALID_SOLUTION", f"job {v} scheduled twice")
            if lts.jobs[v] != mid:
                raise SchedError(
                    "INVALID_SOLUTION", f"job {v} placed on the wrong machine"
                )
            if not preds[v] <= done | block:
                raise SchedError(
                    "INVALID_SOLUTION", f"job {v} runs before a predecessor"
                )
        seen |= block
        done |= block
    if seen != set(lts.jobs):
        raise SchedError("INVALID_SOLUTION", "blocks do not cover every job")


def validate_lts(lts: LtsInstance) -> None:
    mids = [mid for mid, _ in lts.machines]
    if len(set(mids)) != len(mids):
        raise bad_params("duplicate machine ids")
    if any(load < 1 for _, load in lts.machines):
        raise SchedError("BAD_LOADS", "loading times must be positive")
    known = set(mids)
    for vid, mid in lts.jobs.items():
        if mid not in known:
            raise SchedError("MISSING_JOB", f"job {vid} sits on unknown machine {mid}")
    for u, v in lts.edges:
        if u not in lts.jobs or v not in lts.jobs:
            raise SchedError("MISSING_JOB", f"edge ({u}, {v}) references unknown jobs")
    topological_order(sorted(lts.jobs), lts.edges)


def lts_brute_force(lts: LtsInstance, limit: int = 15) -> tuple[int, LtsSolution]:
    """Exact minimum total loading time via Dijkstra over finished-job sets.

    When a machine is switched on it may as well run every job that is or
    becomes ready during the block, so a transition takes the full closure of
    runnable jobs on one machine.
    """
    validate_lts(lts)
    if len(lts.jobs) > limit:
        raise SchedError("TOO_LARGE", f"{len(lts.jobs)} jobs exceed the limit {limit}")
    preds = graph_predecessors(sorted(lts.jobs), lts.edges)
    loads = {mid: load for mid, load in lts.machines}
    by_machine: dict[int, list[int]] = {}
    for vid, mid in sorted(lts.jobs.items()):
        by_machine.setdefault(mid, []).append(vid)
    start: frozenset[int] = frozenset()
    goal = frozenset(lts.jobs)
    parent: dict[frozenset[int], tuple] = {start: (None, None)}
    best = {start: 0}
    heap: list[tuple[int, int, frozenset[int]]] = [(0, 0, start)]
    seq_no = 0
    while heap:
        g, _, done = heapq.heappop(heap)
        if g > best.get(done, g):
            continue
        if done == goal:
            blocks: list[tuple[int, tuple[int, ...]]] = []
            key = done
            while parent[key][0] is not None:
                key, block = parent[key]
                blocks.append(block)
            return g, LtsSolution(tuple(reversed(blocks)))
        for mid, members in by_machine.items():
            closure: set[int] = set()
            changed = True
            while changed:
                changed = False
                for v in members:
                    if v in done or v in closure:
                        continue
                    if preds[v] <= done | closure:
                        closure.add(v)
                        changed = True
            if not closure:
                continue
            nxt = done | closure
            g2 = g + loads[mid]
            if best.get(nxt, g2 + 1) <= g2:
                continue
            best[nxt] = g2
            parent[nxt] = (done, (mid, tuple(sorted(closure))))
            seq_no += 1
            heapq.heappush(heap, (g2, seq_no, nxt))
    raise SchedError("DEADLOCK", "loading-time search exhausted")
