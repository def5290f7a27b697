"""JSON shapes for instances, schedules, traces, reductions, and reports.

Rationals travel as "num/den" strings; parsing also accepts bare integers
and integer strings.  Every *_from_json rejects malformed input with
BAD_PARAMS rather than letting stray types leak inward.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Mapping

from .baselines import LtsInstance, LtsSolution, ScsInstance
from .chains import ChainSpec
from .core import FeasibilityReport, Instance, Job, Schedule
from .errors import bad_params
from .experiments import ExperimentReport
from .generators import OnlineInstance
from .onl import OnlTrace
from .reductions import LtsPrep, ReductionMap


def fraction_to_json(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def fraction_from_json(value: Any) -> Fraction:
    if isinstance(value, bool):
        raise bad_params(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as err:
            raise bad_params(f"not a rational: {value!r}") from err
    raise bad_params(f"not a rational: {value!r}")


def _require(data: Mapping, key: str) -> Any:
    if key not in data:
        raise bad_params(f"missing field {key!r}")
    return data[key]


def _int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise bad_params(f"{what} must be an integer, got {value!r}")
    return value


def _edge_list(value: Any) -> frozenset[tuple[int, int]]:
    edges = set()
    for pair in value:
        u, v = pair
        edges.add((_int(u, "edge endpoint"), _int(v, "edge endpoint")))
    return frozenset(edges)


# ---------------------------------------------------------------------------
# scheduling instances and schedules


def _chain_to_json(spec: ChainSpec) -> dict:
    return {
        "m": spec.m,
        "i": spec.i,
        "skinny": list(spec.skinny_ids),
        "fat": list(spec.fat_ids),
        "skinny_demand": fraction_to_json(spec.skinny_demand),
        "fat_duration": spec.fat_duration,
    }


def _chain_from_json(data: Mapping) -> ChainSpec:
    return ChainSpec(
        m=_int(_require(data, "m"), "chain m"),
        i=_int(_require(data, "i"), "chain i"),
        skinny_ids=tuple(_int(x, "chain job id") for x in _require(data, "skinny")),
        fat_ids=tuple(_int(x, "chain job id") for x in _require(data, "fat")),
        skinny_demand=fraction_from_json(_require(data, "skinny_demand")),
        fat_duration=_int(_require(data, "fat_duration"), "fat duration"),
    )


def instance_to_json(inst: Instance, meta: dict | None = None) -> dict:
    out: dict = {
        "d": inst.d,
        "budgets": [fraction_to_json(b) for b in inst.budgets],
        "jobs": [
            {
                "id": v.id,
                "duration": v.duration,
                "demand": [fraction_to_json(x) for x in v.demand],
            }
            for v in inst.jobs
        ],
        "edges": sorted([u, v] for u, v in inst.edges),
    }
    if inst.chains:
        out["chains"] = [_chain_to_json(spec) for spec in inst.chains]
    if meta is not None:
        out["meta"] = meta
    return out


def online_to_json(online: OnlineInstance) -> dict:
    return instance_to_json(online.instance, online.meta)


def instance_from_json(data: Mapping) -> tuple[Instance, dict | None]:
    """Parse instance JSON; returns the instance and the meta block if any."""
    budgets = tuple(fraction_from_json(b) for b in _require(data, "budgets"))
    if "d" in data and _int(data["d"], "d") != len(budgets):
        raise bad_params("d does not match the number of budgets")
    jobs = []
    for item in _require(data, "jobs"):
        demand = tuple(fraction_from_json(x) for x in _require(item, "demand"))
        if len(demand) != len(budgets):
            raise bad_params(f"job {item.get('id')}: demand width != d")
        jobs.append(
            Job(
                _int(_require(item, "id"), "job id"),
                _int(_require(item, "duration"), "duration"),
                demand,
            )
        )
    chains = tuple(_chain_from_json(c) for c in data.get("chains", []))
    inst = Instance(tuple(jobs), _edge_list(data.get("edges", [])), budgets, chains)
    meta = data.get("meta")
    if meta is not None and not isinstance(meta, dict):
        raise bad_params("meta must be an object")
    return inst, meta


def schedule_to_json(sched: Schedule) -> dict:
    return {
        "assignments": [
            {"id": vid, "start": s, "rank": r}
            for vid, (s, r) in sorted(sched.assignments.items())
        ]
    }


def schedule_from_json(data: Mapping) -> Schedule:
    assignments: dict[int, tuple[int, int]] = {}
    for item in _require(data, "assignments"):
        vid = _int(_require(item, "id"), "job id")
        if vid in assignments:
            raise bad_params(f"job {vid} assigned twice")
        assignments[vid] = (
            _int(_require(item, "start"), "start"),
            _int(item.get("rank", 0), "rank"),
        )
    return Schedule(assignments)


def trace_to_json(trace: OnlTrace) -> dict:
    return {
        "levels": [
            {
                "level": s.level,
                "jobs": sorted(s.jobs),
                "tau": s.tau,
                "work": [fraction_to_json(w) for w in s.work],
            }
            for s in trace.levels
        ],
        "l_max": trace.l_max,
        "l_end": trace.l_end,
        "t_max": trace.t_max,
        "makespan": trace.makespan,
    }


def feasibility_to_json(report: FeasibilityReport) -> dict:
    return {
        "feasible": report.feasible,
        "violations": [
            {"kind": v.kind, "jobs": list(v.jobs), "instant": v.instant}
            for v in report.violations
        ],
    }


# ---------------------------------------------------------------------------
# supersequence and loading-time problems


def scs_to_json(scs: ScsInstance) -> dict:
    return {"rho": scs.rho, "sequences": [list(s) for s in scs.sequences]}


def scs_from_json(data: Mapping) -> ScsInstance:
    rho = _int(_require(data, "rho"), "rho")
    seqs = tuple(
        tuple(_int(c, "symbol") for c in seq) for seq in _require(data, "sequences")
    )
    return ScsInstance(rho, seqs)


def lts_to_json(lts: LtsInstance) -> dict:
    return {
        "machines": [{"id": mid, "load": load} for mid, load in lts.machines],
        "jobs": [
            {"id": vid, "machine": mid} for vid, mid in sorted(lts.jobs.items())
        ],
        "edges": sorted([u, v] for u, v in lts.edges),
    }


def lts_from_json(data: Mapping) -> LtsInstance:
    machines = tuple(
        (_int(_require(m, "id"), "machine id"), _int(_require(m, "load"), "load"))
        for m in _require(data, "machines")
    )
    jobs: dict[int, int] = {}
    for item in _require(data, "jobs"):
        vid = _int(_require(item, "id"), "job id")
        if vid in jobs:
            raise bad_params(f"job {vid} listed twice")
        jobs[vid] = _int(_require(item, "machine"), "machine id")
    return LtsInstance(machines, jobs, _edge_list(data.get("edges", [])))


def lts_solution_to_json(solution: LtsSolution) -> dict:
    return {
        "blocks": [
            {"machine": mid, "jobs": list(members)}
            for mid, members in solution.blocks
        ]
    }


def lts_solution_from_json(data: Mapping) -> LtsSolution:
    blocks = tuple(
        (
            _int(_require(b, "machine"), "machine id"),
            tuple(_int(v, "job id") for v in _require(b, "jobs")),
        )
        for b in _require(data, "blocks")
    )
    return LtsSolution(blocks)


def lts_prep_to_json(prep: LtsPrep) -> dict:
    return {
        "instance": lts_to_json(prep.instance),
        "dropped": list(prep.dropped),
        "iterations": prep.iterations,
    }


# ---------------------------------------------------------------------------
# reduction carriers and experiment reports


def reduction_map_to_json(rmap: ReductionMap) -> dict:
    return {
        "kind": rmap.kind,
        "rho": rmap.rho,
        "instance": instance_to_json(rmap.instance),
        "sequences": [list(s) for s in rmap.sequences],
        "chain_of_char": [list(t) for t in rmap.chain_of_char],
        "machines": [list(t) for t in rmap.machines],
        "chain_of_job": [list(t) for t in rmap.chain_of_job],
    }


def reduction_map_from_json(data: Mapping) -> ReductionMap:
    kind = _require(data, "kind")
    if kind not in ("scs", "lts"):
        raise bad_params(f"unknown reduction kind {kind!r}")
    inst, _ = instance_from_json(_require(data, "instance"))
    return ReductionMap(
        kind=kind,
        rho=_int(_require(data, "rho"), "rho"),
        instance=inst,
        sequences=tuple(
            tuple(_int(c, "symbol") for c in s) for s in data.get("sequences", [])
        ),
        chain_of_char=tuple(
            (_int(a, "index"), _int(b, "index"), _int(c, "index"))
            for a, b, c in data.get("chain_of_char", [])
        ),
        machines=tuple(
            (_int(a, "machine id"), _int(b, "load"))
            for a, b in data.get("machines", [])
        ),
        chain_of_job=tuple(
            (_int(a, "job id"), _int(b, "index"))
            for a, b in data.get("chain_of_job", [])
        ),
    )


def report_to_json(report: ExperimentReport) -> dict:
    return {
        "family": report.family,
        "grid": report.grid,
        "trials": report.trials,
        "schedulers": list(report.schedulers),
        "rows": [
            {
                "family": r.family,
                "m": r.m,
                "d": r.d,
                "n": r.n,
                "seed": r.seed,
                "scheduler": r.scheduler,
                "makespan": r.makespan,
                "baseline": fraction_to_json(r.baseline),
                "ratio": r.ratio,
            }
            for r in report.rows
        ],
        "aggregates": [
            {
                "scheduler": a.scheduler,
                "m": a.m,
                "d": a.d,
                "n": a.n,
                "mean_ratio": a.mean_ratio,
                "std_ratio": a.std_ratio,
                "runs": a.runs,
            }
            for a in report.aggregates
        ],
    }


__all__ = [
    "fraction_from_json",
    "fraction_to_json",
    "feasibility_to_json",
    "instance_from_json",
    "instance_to_json",
    "lts_from_json",
    "lts_prep_to_json",
    "lts_solution_from_json",
    "lts_solution_to_json",
    "lts_to_json",
    "online_to_json",
    "reduction_map_from_json",
    "reduction_map_to_json",
    "report_to_json",
    "schedule_from_json",
    "schedule_to_json",
    "scs_from_json",
    "scs_to_json",
    "trace_to_json",
]
