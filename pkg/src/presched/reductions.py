"""Reductions between resource scheduling and two classic ordering problems.

Forward directions encode supersequence or machine-loading inputs as chain
instances; backward directions read solutions off feasible schedules by
counting uniform-length batches against per-type thresholds.  Both round
trips lose at most a factor two in objective value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .baselines import (
    LtsInstance,
    LtsSolution,
    ScsInstance,
    is_supersequence,
    validate_lts,
    validate_lts_solution,
)
from .chains import (
    ChainSpec,
    RankAlloc,
    batch_same_length,
    build_chain,
    chain_instance,
    link_chains,
    normalize_sequential,
    parallel_rounds,
)
from .core import (
    Instance,
    Schedule,
    graph_predecessors,
    graph_successors,
    topological_order,
    transitive_reduction,
)
from .errors import SchedError, bad_params


@dataclass(frozen=True)
class ReductionMap:
    """Ties a reduced scheduling instance back to the problem it encodes.

    kind is "scs" or "lts".  chain_of_char maps (sequence index, position)
    to the index of the chain in instance.chains standing for that
    character; chain_of_job does the same per loading-time job.  machines
    are carried sorted by load so the 1-based position equals the chain
    type index.
    """

    kind: str
    rho: int
    instance: Instance
    sequences: tuple[tuple[int, ...], ...] = ()
    chain_of_char: tuple[tuple[int, int, int], ...] = ()
    machines: tuple[tuple[int, int], ...] = ()
    chain_of_job: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class EpochSequence:
    """Threshold readout of a schedule: entries plus the crossing instants."""

    x: tuple[int, ...]
    times: tuple[int, ...]


# ---------------------------------------------------------------------------
# threshold counting


def threshold_sequence(
    inst: Instance, sched: Schedule, granularity: dict[int, int]
) -> EpochSequence:
    """Emit one entry i per granularity[i] completed batches of length 2^i.

    The schedule is first pulled into sequential form and restaged so every
    start group holds jobs of a single length; group lengths must then be
    powers of two with exponents drawn from the granularity table.
    """
    seq = batch_same_length(inst, normalize_sequential(inst, sched))
    by_start: dict[int, int] = {}
    for v in inst.positive_jobs():
        by_start[seq.start(v.id)] = v.duration
    counts = {i: 0 for i in granularity}
    x: list[int] = []
    times: list[int] = []
    for s in sorted(by_start):
        dur = by_start[s]
        i = dur.bit_length() - 1
        if dur != 1 << i or i not in counts:
            raise SchedError(
                "INFEASIBLE_INPUT", f"unexpected batch length {dur} at {s}"
            )
        counts[i] += 1
        if counts[i] == granularity[i]:
            counts[i] = 0
            x.append(i)
            times.append(s)
    return EpochSequence(tuple(x), tuple(times))


# ---------------------------------------------------------------------------
# supersequence <-> scheduling


def scs_to_rs(scs: ScsInstance) -> tuple[Instance, ReductionMap]:
    """Encode a supersequence input as chains on one unit resource.

    Character c of any sequence becomes a chain of type (rho, c); chains of
    one sequence are linked sink to source, so finishing the instance means
    threading every sequence in order.
    """
    if scs.rho < 1:
        raise bad_params("alphabet size must be at least 1")
    seqs = tuple(tuple(s) for s in scs.sequences)
    for seq in seqs:
        for c in seq:
            if not 1 <= c <= scs.rho:
                raise SchedError(
                    "SYMBOL_OUT_OF_RANGE", f"symbol {c} outside 1..{scs.rho}"
                )
    total_jobs = sum(2 << (scs.rho - c) for seq in seqs for c in seq)
    eps = Fraction(1, 2 * total_jobs) if total_jobs else Fraction(1, 2)
    groups = []
    chain_of_char: list[tuple[int, int, int]] = []
    rows: list[list[ChainSpec]] = []
    id_base = 0
    chain_idx = 0
    for si, seq in enumerate(seqs):
        row: list[ChainSpec] = []
        for pi, c in enumerate(seq):
            spec, jobs, edges = build_chain(scs.rho, c, eps, 0, id_base)
            id_base += 2 * spec.tuple_count
            groups.append((spec, jobs, edges))
            chain_of_char.append((si, pi, chain_idx))
            row.append(spec)
            chain_idx += 1
        rows.append(row)
    extra = [link_chains(a, b) for row in rows for a, b in zip(row, row[1:])]
    inst = chain_instance(groups, extra)
    rmap = ReductionMap(
        kind="scs",
        rho=scs.rho,
        instance=inst,
        sequences=seqs,
        chain_of_char=tuple(chain_of_char),
    )
    return inst, rmap


def supersequence_to_schedule(rmap: ReductionMap, z: list[int]) -> Schedule:
    """Play a supersequence as epochs of parallel same-symbol chains.

    Entry c runs, for every sequence whose next unmatched character is c,
    that character's chain; all those chains share the skinny length 2^c,
    so the epoch packs them side by side in 2^rho time.  Entries that match
    nothing are skipped at no cost.
    """
    if rmap.kind != "scs":
        raise bad_params("map does not describe a supersequence reduction")
    chains: dict[tuple[int, int], ChainSpec] = {
        (si, pi): rmap.instance.chains[idx] for si, pi, idx in rmap.chain_of_char
    }
    pointer = [0] * len(rmap.sequences)
    ranks = RankAlloc()
    out: dict[int, tuple[int, int]] = {}
    t = 0
    for c in z:
        specs = []
        for si, seq in enumerate(rmap.sequences):
            p = pointer[si]
            if p < len(seq) and seq[p] == c:
                specs.append(chains[(si, p)])
                pointer[si] += 1
        if not specs:
            continue
        frag, t = parallel_rounds(specs, t, ranks)
        out.update(frag)
    if any(p < len(seq) for p, seq in zip(pointer, rmap.sequences)):
        raise SchedError(
            "NOT_SUPERSEQUENCE", "input does not contain every sequence"
        )
    return Schedule(out)


def schedule_to_supersequence(
    rmap: ReductionMap, sched: Schedule
) -> tuple[int, ...]:
    """Recover a supersequence from any feasible schedule of the encoding.

    Each symbol c crosses its threshold once per 2^(rho-c) batches of
    length 2^c; a chain standing for c occupies that many batches between
    its first and last skinny, so one crossing lands inside every
    character's window and the windows of a sequence appear in order.
    """
    if rmap.kind != "scs":
        raise bad_params("map does not describe a supersequence reduction")
    gran = {c: 1 << (rmap.rho - c) for c in range(1, rmap.rho + 1)}
    z = threshold_sequence(rmap.instance, sched, gran).x
    if not is_supersequence(z, rmap.sequences):
        raise SchedError(
            "INFEASIBLE_INPUT", "schedule does not thread every sequence"
        )
    return z


# ---------------------------------------------------------------------------
# loading times: preprocessing


def resolve_bonded_edges(lts: LtsInstance) -> tuple[LtsInstance, int]:
    """Rewrite direct same-machine edges until none remain.

    Within a block the machine runs its ready jobs in any internal order, so
    a same-machine edge only carries its tail's outside context: the head
    inherits the tail's incoming edges and the edge is dropped.  Transitive
    reduction before each pick keeps shadowed edges from triggering
    rewrites.
    """
    validate_lts(lts)
    nodes = sorted(lts.jobs)
    edges = transitive_reduction(nodes, lts.edges)
    iterations = 0
    while True:
        bonded = sorted(
            (u, v) for u, v in edges if lts.jobs[u] == lts.jobs[v]
        )
        if not bonded:
            return LtsInstance(tuple(lts.machines), dict(lts.jobs), edges), iterations
        if iterations >= len(nodes) ** 2:
            raise SchedError("DEADLOCK", "edge rewrite failed to converge")
        u, v = bonded[0]
        rewritten = set(edges)
        rewritten.discard((u, v))
        rewritten.update((p, v) for p, q in edges if q == u)
        edges = transitive_reduction(nodes, rewritten)
        iterations += 1


def bound_loading_times(lts: LtsInstance) -> tuple[LtsInstance, tuple[int, ...]]:
    """Cut machines below the largest load gap exceeding a factor of n.

    Everything the cheap machines could cost is below one switch-on of the
    next kept machine, so their jobs are dropped and kept jobs inherit
    reachability through them.  Without such a gap the instance is returned
    unchanged apart from machine ordering.
    """
    validate_lts(lts)
    n = len(lts.jobs)
    machines = tuple(sorted(lts.machines, key=lambda ml: (ml[1], ml[0])))
    gap = None
    for k in range(len(machines) - 1):
        if machines[k + 1][1] > n * machines[k][1]:
            gap = k
    if gap is None:
        return LtsInstance(machines, dict(lts.jobs), lts.edges), ()
    cut = {mid for mid, _ in machines[: gap + 1]}
    kept_jobs = {v: mid for v, mid in lts.jobs.items() if mid not in cut}
    dropped = tuple(sorted(set(lts.jobs) - set(kept_jobs)))
    succs = graph_successors(sorted(lts.jobs), lts.edges)
    closure: set[tuple[int, int]] = set()
    for u in kept_jobs:
        stack = list(succs[u])
        seen: set[int] = set()
        while stack:
            w = stack.pop()
            if w in seen:
                continue
            seen.add(w)
            if w in kept_jobs:
                closure.add((u, w))
            stack.extend(succs[w])
    edges = transitive_reduction(sorted(kept_jobs), closure)
    return LtsInstance(machines[gap + 1 :], kept_jobs, edges), dropped


def _nearest_pow2(x: int) -> int:
    lo = 1 << (x.bit_length() - 1)
    if lo == x:
        return x
    hi = lo << 1
    return lo if x - lo < hi - x else hi


def round_and_normalize_loads(lts: LtsInstance) -> LtsInstance:
    """Round loads to the nearest power of two (ties up), rescale to min 1."""
    validate_lts(lts)
    if not lts.machines:
        return LtsInstance((), dict(lts.jobs), lts.edges)
    rounded = [(mid, _nearest_pow2(load)) for mid, load in lts.machines]
    lo = min(load for _, load in rounded)
    scaled = sorted(
        ((mid, load // lo) for mid, load in rounded), key=lambda ml: (ml[1], ml[0])
    )
    return LtsInstance(tuple(scaled), dict(lts.jobs), lts.edges)


@dataclass(frozen=True)
class LtsPrep:
    instance: LtsInstance
    dropped: tuple[int, ...]
    iterations: int


def lts_prep(lts: LtsInstance) -> LtsPrep:
    """Full pipeline: rewrite edges, cut the load gap, round, rewrite again.

    Cutting machines replaces paths through dropped jobs by direct edges,
    which can surface new same-machine edges, hence the second rewrite.
    """
    resolved, it1 = resolve_bonded_edges(lts)
    bounded, dropped = bound_loading_times(resolved)
    rounded = round_and_normalize_loads(bounded)
    final, it2 = resolve_bonded_edges(rounded)
    return LtsPrep(final, dropped, it1 + it2)


def lift_bounded_solution(
    original: LtsInstance, solution: LtsSolution, dropped: tuple[int, ...]
) -> tuple[LtsSolution, int]:
    """Reinsert jobs that bound_loading_times dropped, as singleton blocks.

    Each dropped job lands right after its last placed ancestor and before
    its first placed descendant.  When ancestors and descendants meet in a
    single block, that block is split around the insertion; the split count
    is returned so callers can account for the extra switch-ons.
    """
    validate_lts(original)
    drop = set(dropped)
    if not drop <= set(original.jobs):
        raise bad_params("dropped jobs are not part of the instance")
    placed = [v for _, members in solution.blocks for v in members]
    if len(placed) != len(set(placed)) or set(placed) != set(original.jobs) - drop:
        raise SchedError(
            "INVALID_SOLUTION", "solution must cover exactly the kept jobs"
        )

    nodes = sorted(original.jobs)
    order = topological_order(nodes, original.edges)
    preds = graph_predecessors(nodes, original.edges)
    anc: dict[int, set[int]] = {}
    for v in order:
        anc[v] = set().union(*(anc[p] | {p} for p in preds[v])) if preds[v] else set()
    desc: dict[int, set[int]] = {v: set() for v in nodes}
    for v in reversed(order):
        for p in preds[v]:
            desc[p] |= desc[v] | {v}

    blocks = [(mid, list(members)) for mid, members in solution.blocks]
    done: set[int] = set()
    for mid, members in blocks:
        for v in members:
            if original.jobs[v] != mid:
                raise SchedError(
                    "INVALID_SOLUTION", f"job {v} placed on the wrong machine"
                )
            if (anc[v] - drop) - done - set(members):
                raise SchedError(
                    "INVALID_SOLUTION", f"job {v} runs before an ancestor"
                )
        done |= set(members)

    splits = 0
    for v in (w for w in order if w in drop):
        pos = {w: bi for bi, (_, members) in enumerate(blocks) for w in members}
        lo = max((pos[a] for a in anc[v] if a in pos), default=-1) + 1
        hi = min((pos[b] for b in desc[v] if b in pos), default=len(blocks))
        mid_v = original.jobs[v]
        if lo <= hi:
            blocks.insert(lo, (mid_v, [v]))
            continue
        # ancestors and descendants share block hi; lo == hi + 1 here
        bm, members = blocks[hi]
        pre = [w for w in members if w in anc[v]]
        post = [w for w in members if w not in anc[v]]
        if not pre or not post:
            raise SchedError("INVALID_SOLUTION", "no room to wedge a dropped job")
        blocks[hi : hi + 1] = [(bm, pre), (mid_v, [v]), (bm, post)]
        splits += 1

    out = LtsSolution(tuple((mid, tuple(members)) for mid, members in blocks))
    validate_lts_solution(original, out)
    return out, splits


# ---------------------------------------------------------------------------
# loading times <-> scheduling


def lts_to_rs(lts: LtsInstance) -> tuple[Instance, ReductionMap]:
    """Encode a prepared loading-time input as chains on one unit resource.

    With machines sorted by load and loads scaled to powers of two starting
    at 1, the job of 1-based machine index i becomes a chain of type
    (rho + log2(load), i): total length 2^rho * load, skinny length 2^i.
    Same-machine edges must have been rewritten away first.
    """
    validate_lts(lts)
    machines = tuple(lts.machines)
    loads = [load for _, load in machines]
    if loads != sorted(loads):
        raise SchedError("UNSORTED_MACHINES", "machines must be sorted by load")
    if machines:
        if any(load & (load - 1) for load in loads) or loads[0] != 1:
            raise SchedError(
                "BAD_LOADS", "loads must be powers of two with minimum 1"
            )
    for u, v in lts.edges:
        if lts.jobs[u] == lts.jobs[v]:
            raise SchedError(
                "BONDED_EDGES", f"same-machine edge ({u}, {v}) not resolved"
            )
    rho = len(machines)
    index_of = {mid: k for k, (mid, _) in enumerate(machines, start=1)}
    f = {
        k: rho + load.bit_length() - 1
        for k, (_, load) in enumerate(machines, start=1)
    }
    total_jobs = sum(
        2 << (f[index_of[mid]] - index_of[mid]) for mid in lts.jobs.values()
    )
    eps = Fraction(1, 2 * total_jobs) if total_jobs else Fraction(1, 2)
    groups = []
    chain_of_job: list[tuple[int, int]] = []
    spec_of: dict[int, ChainSpec] = {}
    id_base = 0
    for chain_idx, (v, mid) in enumerate(sorted(lts.jobs.items())):
        i = index_of[mid]
        spec, jobs, edges = build_chain(f[i], i, eps, 0, id_base)
        id_base += 2 * spec.tuple_count
        groups.append((spec, jobs, edges))
        chain_of_job.append((v, chain_idx))
        spec_of[v] = spec
    extra = [link_chains(spec_of[u], spec_of[v]) for u, v in sorted(lts.edges)]
    inst = chain_instance(groups, extra)
    rmap = ReductionMap(
        kind="lts",
        rho=rho,
        instance=inst,
        machines=machines,
        chain_of_job=tuple(chain_of_job),
    )
    return inst, rmap


def lts_instance_of_map(rmap: ReductionMap) -> LtsInstance:
    """Rebuild the encoded loading-time input from the carrier alone.

    Chain types give each job's machine; the linking edges between chains
    give back the precedence relation.
    """
    if rmap.kind != "lts":
        raise bad_params("map does not describe a loading-time reduction")
    owner: dict[int, int] = {}
    jobs: dict[int, int] = {}
    for v, idx in rmap.chain_of_job:
        spec = rmap.instance.chains[idx]
        jobs[v] = rmap.machines[spec.i - 1][0]
        for jid in spec.job_ids():
            owner[jid] = v
    edges = {
        (owner[a], owner[b])
        for a, b in rmap.instance.edges
        if owner[a] != owner[b]
    }
    return LtsInstance(rmap.machines, jobs, frozenset(edges))


def lts_solution_to_schedule(rmap: ReductionMap, solution: LtsSolution) -> Schedule:
    """Play blocks as epochs: block k runs its chains side by side.

    Every chain of machine index i shares type (f(i), i), so a block of
    load-l jobs spans exactly 2^rho * l and the makespan is 2^rho times the
    solution cost.
    """
    lts = lts_instance_of_map(rmap)
    validate_lts_solution(lts, solution)
    chain_by_job = dict(rmap.chain_of_job)
    ranks = RankAlloc()
    out: dict[int, tuple[int, int]] = {}
    t = 0
    for _, members in solution.blocks:
        specs = [rmap.instance.chains[chain_by_job[v]] for v in sorted(members)]
        frag, t = parallel_rounds(specs, t, ranks)
        out.update(frag)
    return Schedule(out)


def schedule_to_lts_solution(rmap: ReductionMap, sched: Schedule) -> LtsSolution:
    """Recover an ordered block plan from any feasible schedule.

    Machine index i crosses its threshold once per load * 2^(rho-i) batches
    of length 2^i, which is one full chain of work; each crossing opens a
    block taking every ready job of that machine, and a feasible schedule
    leaves nothing behind.
    """
    lts = lts_instance_of_map(rmap)
    rho = rmap.rho
    gran = {
        k: load << (rho - k) for k, (_, load) in enumerate(rmap.machines, start=1)
    }
    entries = threshold_sequence(rmap.instance, sched, gran).x
    preds = graph_predecessors(sorted(lts.jobs), lts.edges)
    machine_at = {k: mid for k, (mid, _) in enumerate(rmap.machines, start=1)}
    todo = dict(lts.jobs)
    done: set[int] = set()
    blocks: list[tuple[int, tuple[int, ...]]] = []
    for i in entries:
        mid = machine_at[i]
        members = sorted(
            v for v, m in todo.items() if m == mid and preds[v] <= done
        )
        if not members:
            continue
        blocks.append((mid, tuple(members)))
        done.update(members)
        for v in members:
            del todo[v]
    if todo:
        raise SchedError(
            "INFEASIBLE_INPUT", "schedule does not finish every encoded job"
        )
    return LtsSolution(tuple(blocks))


__all__ = [
    "EpochSequence",
    "LtsPrep",
    "ReductionMap",
    "bound_loading_times",
    "lift_bounded_solution",
    "lts_instance_of_map",
    "lts_prep",
    "lts_solution_to_schedule",
    "lts_to_rs",
    "resolve_bonded_edges",
    "round_and_normalize_loads",
    "schedule_to_lts_solution",
    "schedule_to_supersequence",
    "scs_to_rs",
    "supersequence_to_schedule",
    "threshold_sequence",
]
