"""Online driver: reveals jobs as their predecessors finish, runs a scheduler.

A scheduler only ever sees revealed jobs.  At every instant the driver calls
``decide`` repeatedly (micro-rounds) until the scheduler starts nothing:
zero-duration jobs complete within the instant, which can reveal more work at
the same time but a later rank.  The driver validates every start against the
exact resource rules, so a buggy scheduler fails loudly instead of emitting an
infeasible schedule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Protocol

from .chains import RankAlloc
from .core import Instance, Job, Schedule, predecessors, successors, validate_instance
from .errors import SchedError
from .generators import OnlineInstance


@dataclass(frozen=True)
class RevealEvent:
    time: int
    jobs: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]  # in-edges of the revealed jobs


@dataclass(frozen=True)
class SchedulerView:
    """Read-only snapshot handed to a scheduler at one micro-round."""

    time: int
    revealed: dict[int, Job]
    known_edges: dict[int, tuple[int, ...]]  # job id -> its predecessor ids
    started: frozenset[int]
    finished: frozenset[int]
    running: dict[int, int]  # job id -> finish time
    budgets: tuple[Fraction, ...]
    residual: tuple[Fraction, ...]  # budgets minus demand of running jobs
    straddle: tuple[Fraction, ...]  # demand of running jobs started before `time`

    def unstarted(self) -> list[int]:
        return [v for v in self.revealed if v not in self.started]


class Scheduler(Protocol):
    def decide(self, view: SchedulerView) -> Iterable[int]: ...


@dataclass
class SimLog:
    reveal_events: list[RevealEvent] = field(default_factory=list)
    views: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)
    makespan: int = 0


def simulate_online(
    source: OnlineInstance | Instance, scheduler: Scheduler
) -> tuple[Schedule, SimLog]:
    inst = source.instance if isinstance(source, OnlineInstance) else source
    validate_instance(inst)
    jm = inst.job_map()
    preds = predecessors(inst)
    succs = successors(inst)

    pending = {v: len(ps) for v, ps in preds.items()}
    revealed: dict[int, Job] = {}
    known_edges: dict[int, tuple[int, ...]] = {}
    assignments: dict[int, tuple[int, int]] = {}
    finished: set[int] = set()
    running: dict[int, int] = {}
    residual = list(inst.budgets)
    straddle = [Fraction(0)] * inst.d
    ranks = RankAlloc()
    log = SimLog()
    t = 0

    def reveal(ids: list[int], at: int) -> None:
        if not ids:
            return
        batch = []
        edges = []
        for v in sorted(ids):
            revealed[v] = jm[v]
            known_edges[v] = tuple(sorted(preds[v]))
            batch.append(v)
            edges.extend((p, v) for p in known_edges[v])
        log.reveal_events.append(RevealEvent(at, tuple(batch), tuple(edges)))

    def complete(vid: int) -> list[int]:
        finished.add(vid)
        ready = []
        for w in succs[vid]:
            pending[w] -= 1
            if pending[w] == 0:
                ready.append(w)
        return ready

    reveal([v for v, c in pending.items() if c == 0], 0)

    guard = 0
    limit = 4 * len(inst.jobs) + 16
    while True:
        # micro-rounds at instant t
        while True:
            view = SchedulerView(
                time=t,
                revealed=dict(revealed),
                known_edges=dict(known_edges),
                started=frozenset(assignments),
                finished=frozenset(finished),
                running=dict(running),
                budgets=inst.budgets,
                residual=tuple(residual),
                straddle=tuple(straddle),
            )
            log.views.append((t, tuple(sorted(view.revealed))))
            picks = list(scheduler.decide(view))
            if not picks:
                break
            guard += 1
            if guard > limit:
                raise SchedError("SCHEDULER_VIOLATION", "scheduler loops without progress")
            for vid in picks:
                if vid not in revealed:
                    raise SchedError("SCHEDULER_VIOLATION", f"job {vid} started before reveal")
                if vid in assignments:
                    raise SchedError("SCHEDULER_VIOLATION", f"job {vid} started twice")
                if not preds[vid] <= finished:
                    raise SchedError("REVEAL_VIOLATION", f"job {vid} started before its parents")
                job = jm[vid]
                if job.duration > 0:
                    if any(x > r for x, r in zip(job.demand, residual)):
                        raise SchedError(
                            "SCHEDULER_VIOLATION", f"job {vid} does not fit the residual budget"
                        )
                    assignments[vid] = (t, ranks.take(t))
                    running[vid] = t + job.duration
                    for j, x in enumerate(job.demand):
                        residual[j] -= x
                else:
                    if any(x + s > b for x, s, b in zip(job.demand, straddle, inst.budgets)):
                        raise SchedError(
                            "SCHEDULER_VIOLATION", f"zero job {vid} straddles a full instant"
                        )
                    assignments[vid] = (t, ranks.take(t))
                    reveal(complete(vid), t)

        if not running:
            if len(finished) == len(inst.jobs):
                break
            raise SchedError("DEADLOCK", "scheduler idles while work remains")

        t = min(running.values())
        done_now = sorted(v for v, f in running.items() if f == t)
        ready: list[int] = []
        for vid in done_now:
            del running[vid]
            for j, x in enumerate(jm[vid].demand):
                residual[j] += x
            ready.extend(complete(vid))
        straddle = [b - r for b, r in zip(inst.budgets, residual)]
        reveal(ready, t)

    sched = Schedule(assignments)
    log.makespan = max((s + jm[v].duration for v, (s, _) in assignments.items()), default=0)
    return sched, log
