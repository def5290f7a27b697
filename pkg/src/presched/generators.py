"""Instance generators: adversarial lower-bound families and random DAGs.

All randomness flows through ``random.Random(seed)`` so equal seeds give
byte-identical instances.  Budgets are always 1 per resource; hard families
encode their structure in ``OnlineInstance.meta`` for the offline baselines
and the instrumentation to read.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .chains import ChainSpec, build_chain, link_chains
from .core import Instance, Job, assemble_instance, uniform_demand, validate_instance
from .errors import bad_params

ONE = Fraction(1)


@dataclass(frozen=True)
class OnlineInstance:
    """An instance together with generator metadata.

    The reveal discipline (a job becomes visible only when all its
    predecessors have finished) is enforced by the simulator, not stored
    here; ``meta`` carries family name, parameters, and gadget structure.
    """

    instance: Instance
    meta: dict = field(default_factory=dict)


def as_online(inst: Instance, family: str = "random", **params) -> OnlineInstance:
    return OnlineInstance(inst, {"family": family, "params": dict(params), "blocking": []})


def gen_online_lb_gadget(
    m: int,
    num_gadgets: int | None = None,
    seed: int = 0,
    fat_duration: int = 1,
) -> OnlineInstance:
    """Blocking-chain gadget family on a single resource.

    Each gadget holds one chain of every type (m, 1) .. (m, m).  A uniformly
    random chain per gadget is the blocking chain; its sink gates every chain
    of the next gadget, so an online scheduler cannot tell which chain to
    prioritise while the offline adversary can.
    """
    if m < 1:
        raise bad_params("m must be >= 1")
    if num_gadgets is None:
        num_gadgets = 1 << m
    if num_gadgets < 1:
        raise bad_params("num_gadgets must be >= 1")
    rng = random.Random(seed)
    total_jobs = num_gadgets * 2 * ((1 << m) - 1)
    eps = Fraction(1, 2 * total_jobs)
    budgets = (ONE,)

    jobs: list[Job] = []
    edges: list[tuple[int, int]] = []
    specs: list[ChainSpec] = []
    gadget_meta: list[dict] = []
    nid = 0
    for _ in range(num_gadgets):
        chain_idx: list[int] = []
        for i in range(1, m + 1):
            spec, js, es = build_chain(m, i, eps, fat_duration, nid, budgets)
            nid += 2 * spec.tuple_count
            chain_idx.append(len(specs))
            specs.append(spec)
            jobs.extend(js)
            edges.extend(es)
        blocking = chain_idx[rng.randrange(m)]
        gadget_meta.append(
            {"chains": chain_idx, "blocking": blocking, "end": specs[blocking].sink_id}
        )
    for g in range(num_gadgets - 1):
        blocker = specs[gadget_meta[g]["blocking"]]
        for idx in gadget_meta[g + 1]["chains"]:
            edges.append(link_chains(blocker, specs[idx]))

    inst = assemble_instance(jobs, edges, budgets, tuple(specs))
    meta = {
        "family": "gadget",
        "params": {"m": m, "num_gadgets": num_gadgets, "fat_duration": fat_duration, "seed": seed},
        "gadgets": gadget_meta,
        "blocking": [g["end"] for g in gadget_meta],
    }
    return OnlineInstance(inst, meta)


def gen_multiresource_lb(d: int, m: int, seed: int = 0) -> OnlineInstance:
    """Layered family on d resources: m unit jobs per layer, each demanding
    the full budget of its layer's resource only.  A uniformly random blocking
    job per layer gates the entire next layer."""
    if d < 2:
        raise bad_params("d must be >= 2")
    if m < 1:
        raise bad_params("m must be >= 1")
    rng = random.Random(seed)
    budgets = tuple(ONE for _ in range(d))
    jobs: list[Job] = []
    layers: list[list[int]] = []
    nid = 0
    for layer in range(d):
        demand = tuple(ONE if j == layer else Fraction(0) for j in range(d))
        ids = []
        for _ in range(m):
            jobs.append(Job(nid, 1, demand))
            ids.append(nid)
            nid += 1
        layers.append(ids)
    blocking: list[int] = []
    edges: list[tuple[int, int]] = []
    for layer in range(d - 1):
        b = layers[layer][rng.randrange(m)]
        blocking.append(b)
        edges.extend((b, w) for w in layers[layer + 1])

    inst = assemble_instance(jobs, edges, budgets)
    meta = {
        "family": "multiresource",
        "params": {"d": d, "m": m, "seed": seed},
        "layers": layers,
        "blocking": blocking,
    }
    return OnlineInstance(inst, meta)


def gen_greedy_killer(n: int) -> OnlineInstance:
    """Deterministic family where maximal greedy pays Omega(n^2).

    Job a_i needs the whole budget for one step; b_i is a long thin job that
    greedy eagerly starts, starving a_{i+1}; c_i re-releases the next a.
    """
    if n < 2:
        raise bad_params("n must be >= 2")
    budgets = (ONE,)
    thin = uniform_demand(1, Fraction(1, 2 * n))
    full = (ONE,)
    jobs: list[Job] = []
    a_ids, b_ids, c_ids = [], [], []
    for k in range(n):
        a = Job(3 * k, 1, full)
        b = Job(3 * k + 1, n, thin)
        c = Job(3 * k + 2, 1, thin)
        jobs.extend((a, b, c))
        a_ids.append(a.id)
        b_ids.append(b.id)
        c_ids.append(c.id)
    edges: list[tuple[int, int]] = []
    for k in range(n):
        edges.append((a_ids[k], b_ids[k]))
        edges.append((a_ids[k], c_ids[k]))
        if k + 1 < n:
            edges.append((c_ids[k], a_ids[k + 1]))

    inst = assemble_instance(jobs, edges, budgets)
    meta = {
        "family": "greedy-killer",
        "params": {"n": n},
        "roles": {"a": a_ids, "b": b_ids, "c": c_ids},
        "blocking": [],
    }
    return OnlineInstance(inst, meta)


def gen_random_dag(
    n: int,
    edge_prob: float,
    max_dur: int,
    d: int,
    seed: int = 0,
) -> Instance:
    """Random DAG with power-of-two durations and rational demands in (0, 1]."""
    if n < 1:
        raise bad_params("n must be >= 1")
    if not (0 <= edge_prob <= 1):
        raise bad_params("edge_prob must lie in [0, 1]")
    if max_dur < 1:
        raise bad_params("max_dur must be >= 1")
    if d < 1:
        raise bad_params("d must be >= 1")
    rng = random.Random(seed)
    budgets = tuple(ONE for _ in range(d))
    order = list(range(n))
    rng.shuffle(order)
    max_exp = max_dur.bit_length() - 1
    jobs = []
    for vid in range(n):
        duration = 1 << rng.randint(0, max_exp)
        demand = tuple(Fraction(rng.randint(1, 16), 16) for _ in range(d))
        jobs.append(Job(vid, duration, demand))
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < edge_prob:
                edges.append((order[a], order[b]))
    inst = Instance(tuple(jobs), frozenset(edges), budgets)
    validate_instance(inst)
    return inst
