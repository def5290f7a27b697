"""Acceptance gate: eleven end-to-end criteria over the whole engine.

Each test prints one PASS/FAIL line (run with -s to see them) and asserts
the criterion. Corpora are built once and shared across criteria; stated
runtime budgets are asserted where the criterion carries one.
"""

from __future__ import annotations

import itertools
import math
import random
import statistics
import time
from fractions import Fraction

from presched import (
    LtsInstance,
    SchedError,
    ScsInstance,
    batch_same_length,
    brute_force_optimal,
    check_feasible,
    depth_profile,
    gadget_crossing_counts,
    gadget_offline_schedule,
    gen_greedy_killer,
    gen_multiresource_lb,
    gen_online_lb_gadget,
    gen_random_dag,
    greedy_killer_offline_schedule,
    is_supersequence,
    level_cap,
    lts_brute_force,
    lts_prep,
    lts_solution_to_schedule,
    lts_to_rs,
    makespan,
    multiresource_offline_schedule,
    normalize_sequential,
    resolve_bonded_edges,
    round_durations_pow2,
    run_greedy,
    run_onl,
    schedule_same_length_parallel,
    schedule_to_lts_solution,
    schedule_to_supersequence,
    scs_brute_force,
    scs_to_rs,
    supersequence_to_schedule,
    validate_lts,
    validate_lts_solution,
)
from presched.chains import build_chain, chain_instance, mixed_type_lower_bound
from presched.onl import level_time_bound, onl_makespan_bound, opt_lower_bound

_CACHE: dict = {}

EPS = Fraction(1, 512)


def _report(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}")


def _corpus_random_onl():
    """200 random DAGs (n <= 40, d in {1,2,3}) with their ONL runs."""
    if "onl200" not in _CACHE:
        runs = []
        for k in range(200):
            n = 5 + (k * 7) % 36
            d = 1 + k % 3
            prob = (0.15, 0.3, 0.5)[k % 3]
            max_dur = (4, 8, 16)[(k // 3) % 3]
            inst = gen_random_dag(n=n, edge_prob=prob, max_dur=max_dur, d=d, seed=k)
            sched, trace = run_onl(inst)
            runs.append((inst, sched, trace))
        _CACHE["onl200"] = runs
    return _CACHE["onl200"]


def _corpus_small_opt():
    """300 instances with <= 9 positive jobs, brute-forced and ONL-run."""
    if "opt300" not in _CACHE:
        runs = []
        for k in range(300):
            n = 2 + k % 8
            d = 1 + k % 3
            prob = (0.2, 0.35, 0.5)[k % 3]
            inst = gen_random_dag(n=n, edge_prob=prob, max_dur=8, d=d, seed=1000 + k)
            opt, opt_sched = brute_force_optimal(inst)
            _sched, trace = run_onl(inst)
            runs.append((inst, opt, opt_sched, trace))
        _CACHE["opt300"] = runs
    return _CACHE["opt300"]


def _random_chain_instance(rng: random.Random):
    groups, base = [], 0
    for _ in range(rng.randint(1, 3)):
        m = rng.randint(1, 3)
        i = rng.randint(0, m)
        fat = rng.choice((0, 1))
        group = build_chain(m, i, EPS, fat, base)
        base += 2 * group[0].tuple_count
        groups.append(group)
    return chain_instance(groups)


def _random_scs(rng: random.Random) -> ScsInstance:
    rho = rng.randint(1, 3)
    seqs = tuple(
        tuple(rng.randint(1, rho) for _ in range(rng.randint(1, 5)))
        for _ in range(rng.randint(1, 4))
    )
    return ScsInstance(rho, seqs)


def _random_lts(rng: random.Random) -> LtsInstance:
    k = rng.randint(1, 3)
    machines = tuple((j + 1, 2**j) for j in range(k))
    n = rng.randint(2, 12)
    jobs = {v: rng.randint(1, k) for v in range(n)}
    edges = set()
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < 0.2:
                edges.add((u, v))
    return LtsInstance(machines, jobs, frozenset(edges))


def test_criterion_1_feasibility_closure():
    t0 = time.monotonic()
    checks = 0
    bad: list[str] = []

    def check(inst, sched, tag):
        nonlocal checks
        checks += 1
        report = check_feasible(inst, sched)
        if not report.feasible:
            bad.append(f"{tag}: {report.violations[0]}")

    for inst, sched, _trace in _corpus_random_onl():
        check(round_durations_pow2(inst), sched, "onl")
        gsched, _log = run_greedy(inst)
        check(inst, gsched, "greedy")

    for inst, _opt, opt_sched, _trace in _corpus_small_opt():
        check(inst, opt_sched, "brute-force")

    for m in (2, 3):
        for seed in range(10):
            online = gen_online_lb_gadget(m, seed=seed)
            osched, _tr = run_onl(online)
            check(round_durations_pow2(online.instance), osched, "gadget-onl")
            check(online.instance, gadget_offline_schedule(online), "gadget-offline")
            gsched, _log = run_greedy(online)
            check(online.instance, gsched, "gadget-greedy")

    for n in (4, 8, 16):
        online = gen_greedy_killer(n)
        gsched, _log = run_greedy(online)
        check(online.instance, gsched, "killer-greedy")
        check(online.instance, greedy_killer_offline_schedule(online), "killer-offline")

    for d in (2, 3):
        for m in (4, 9):
            for seed in range(5):
                online = gen_multiresource_lb(d, m, seed=seed)
                gsched, _log = run_greedy(online)
                check(online.instance, gsched, "multi-greedy")
                check(online.instance, multiresource_offline_schedule(online), "multi-offline")

    rng = random.Random(1)
    for _ in range(48):
        inst = _random_chain_instance(rng)
        sched, _log = run_greedy(inst)
        check(inst, sched, "chain-greedy")
        norm = normalize_sequential(inst, sched)
        check(inst, norm, "chain-normalized")
        check(inst, batch_same_length(inst, norm), "chain-batched")

    rng = random.Random(2)
    for _ in range(25):
        scs = _random_scs(rng)
        _best, z = scs_brute_force(scs)
        rs, rmap = scs_to_rs(scs)
        check(rs, supersequence_to_schedule(rmap, list(z)), "scs-epochs")

    rng = random.Random(3)
    for _ in range(25):
        lts = lts_prep(_random_lts(rng)).instance
        rs, rmap = lts_to_rs(lts)
        _cost, solution = lts_brute_force(lts)
        check(rs, lts_solution_to_schedule(rmap, solution), "lts-epochs")

    elapsed = time.monotonic() - t0
    ok = checks == 1000 and not bad and elapsed < 120
    _report(1, ok, f"{checks} schedules feasible, {len(bad)} violations, {elapsed:.1f}s")
    assert checks == 1000, f"mixed-run count is {checks}, wanted 1000"
    assert not bad, bad[:5]
    assert elapsed < 120


def test_criterion_2_onl_explicit_bound():
    global_bad = 0
    level_bad = 0
    for inst, _sched, trace in _corpus_random_onl():
        if not trace.makespan <= onl_makespan_bound(inst, trace):
            global_bad += 1
        for stats in trace.levels:
            if not stats.tau <= level_time_bound(inst, stats, trace):
                level_bad += 1
    ok = global_bad == 0 and level_bad == 0
    _report(2, ok, f"200 runs, {global_bad} global / {level_bad} per-level violations")
    assert ok


def test_criterion_3_level_depth_invariants():
    bad = 0
    for inst, _sched, trace in _corpus_random_onl():
        rounded = round_durations_pow2(inst)
        jm = rounded.job_map()
        depth = depth_profile(rounded)
        for stats in trace.levels:
            for vid in stats.jobs:
                t = jm[vid].duration
                lvl = stats.level
                if lvl % t != 0 or t > level_cap(lvl) or depth[vid] < Fraction(lvl - t, 2):
                    bad += 1
    _report(3, bad == 0, f"200 runs, {bad} level/depth violations")
    assert bad == 0


def test_criterion_4_opt_lower_bound():
    t0 = time.monotonic()
    bad = 0
    for inst, opt, _opt_sched, trace in _corpus_small_opt():
        if not opt >= opt_lower_bound(inst, trace):
            bad += 1
    elapsed = time.monotonic() - t0
    ok = bad == 0 and elapsed < 300
    _report(4, ok, f"300 instances, {bad} violations, {elapsed:.1f}s")
    assert ok


def test_criterion_5_desk_scale_competitiveness():
    bad = 0
    worst = 0.0
    for inst, opt, _opt_sched, trace in _corpus_small_opt():
        n = len(inst.jobs)
        ratio = Fraction(trace.makespan, opt)
        limit = 4 * (inst.d + math.log2(n) + 1)
        worst = max(worst, float(ratio) / limit)
        if float(ratio) > limit:
            bad += 1
    _report(5, bad == 0, f"300 instances, {bad} over 4(d+log2(n)+1), worst frac {worst:.2f}")
    assert bad == 0


def test_criterion_6_greedy_separation():
    t0 = time.monotonic()
    failures = []
    for n in (8, 16, 32):
        online = gen_greedy_killer(n)
        _gsched, glog = run_greedy(online)
        off = greedy_killer_offline_schedule(online)
        constructed = makespan(online.instance, off)
        _osched, trace = run_onl(online)
        if glog.makespan < n * n:
            failures.append(f"n={n}: greedy {glog.makespan} < n^2")
        if constructed > 3 * n + 2:
            failures.append(f"n={n}: constructed {constructed} > 3n+2")
        if Fraction(glog.makespan, constructed) < Fraction(n, 4):
            failures.append(f"n={n}: greedy ratio below n/4")
        if trace.makespan / constructed > 4 * (2 + math.log2(n)):
            failures.append(f"n={n}: onl ratio {trace.makespan / constructed:.2f} too big")
    elapsed = time.monotonic() - t0
    ok = not failures and elapsed < 60
    _report(6, ok, f"n in {{8,16,32}}, {len(failures)} failures, {elapsed:.1f}s")
    assert ok, failures


def test_criterion_7_online_lower_bound_trend():
    t0 = time.monotonic()
    means = {}
    crossing_rates = {}
    failures = []
    for m in (3, 4, 5):
        ratios = []
        crossings: list[int] = []
        for seed in range(20):
            online = gen_online_lb_gadget(m, seed=seed, fat_duration=1)
            osched, trace = run_onl(online)
            off = gadget_offline_schedule(online)
            ratios.append(trace.makespan / makespan(online.instance, off))
            crossings.extend(gadget_crossing_counts(online, osched))
        means[m] = statistics.fmean(ratios)
        crossing_rates[m] = (statistics.fmean(crossings), len(crossings))
        if len(crossings) < 160:
            failures.append(f"m={m}: only {len(crossings)} crossings sampled")
        if statistics.fmean(crossings) < m / 4:
            failures.append(f"m={m}: mean crossings {statistics.fmean(crossings):.2f} < m/4")
    if not (means[3] < means[4] < means[5]):
        failures.append(f"means not increasing: {means}")
    elapsed = time.monotonic() - t0
    ok = not failures and elapsed < 300
    detail = ", ".join(f"m={m}: ratio {means[m]:.3f}, crossings {crossing_rates[m][0]:.2f}" for m in means)
    _report(7, ok, f"{detail}, {elapsed:.1f}s")
    assert ok, failures


def test_criterion_8_multiresource_trend():
    t0 = time.monotonic()
    failures = []
    observed = {}
    for d in (3, 4, 5):
        m = 3 * d * d
        spans = []
        for seed in range(30):
            online = gen_multiresource_lb(d, m, seed=seed)
            _sched, log = run_greedy(online)
            spans.append(log.makespan)
        mean_ratio = statistics.fmean(spans) / (d + m)
        observed[d] = mean_ratio
        if mean_ratio < (d - 1) / 2:
            failures.append(f"d={d}: mean ratio {mean_ratio:.2f} < (d-1)/2")
    elapsed = time.monotonic() - t0
    ok = not failures and elapsed < 120
    detail = ", ".join(f"d={d}: {ratio:.2f}" for d, ratio in observed.items())
    _report(8, ok, f"greedy/(d+m) {detail}, {elapsed:.1f}s")
    assert ok, failures


def test_criterion_9_chains_properties():
    failures = []

    # (a) same-type parallel equals the longest chain, and the brute force
    for p in (1, 2, 3):
        for m in (1, 2, 3):
            for i in range(0, m + 1):
                groups, base = [], 0
                for _ in range(p):
                    g = build_chain(m, i, EPS, 0, base)
                    base += 2 * g[0].tuple_count
                    groups.append(g)
                inst = chain_instance(groups)
                sched = schedule_same_length_parallel(inst, [g[0] for g in groups])
                if not check_feasible(inst, sched).feasible:
                    failures.append(f"(a) p={p} C({m},{i}): infeasible")
                    continue
                if makespan(inst, sched) != 2**m:
                    failures.append(f"(a) p={p} C({m},{i}): makespan != 2^m")
                if len(inst.jobs) <= 12:
                    opt, _ = brute_force_optimal(inst, limit=12)
                    if opt != 2**m:
                        failures.append(f"(a) p={p} C({m},{i}): opt {opt} != 2^m")

    # (b) two mixed-type chains cannot beat half the total skinny length
    types = [(m, i) for m in range(1, 4) for i in range(0, m + 1)]
    pairs = [(a, b) for a, b in itertools.combinations(types, 2) if a[1] != b[1]]
    for a, b in pairs:
        groups, base = [], 0
        for m, i in (a, b):
            g = build_chain(m, i, EPS, 0, base)
            base += 2 * g[0].tuple_count
            groups.append(g)
        inst = chain_instance(groups)
        opt, _ = brute_force_optimal(inst, limit=24)
        if opt < mixed_type_lower_bound([a, b]):
            failures.append(f"(b) {a}+{b}: opt {opt} below bound")

    # (c) normalize never increases the makespan, batching at most doubles it
    rng = random.Random(90)
    for _ in range(100):
        inst = _random_chain_instance(rng)
        sched, _log = run_greedy(inst)
        before = makespan(inst, sched)
        norm = normalize_sequential(inst, sched)
        mid = makespan(inst, norm)
        batched = batch_same_length(inst, norm)
        after = makespan(inst, batched)
        if mid > before or after > 2 * mid:
            failures.append(f"(c) {before} -> {mid} -> {after}")
        if not check_feasible(inst, batched).feasible:
            failures.append("(c) batched schedule infeasible")

    ok = not failures
    _report(9, ok, f"(a) 30 combos, (b) {len(pairs)} pairs, (c) 100 schedules, {len(failures)} failures")
    assert ok, failures[:5]


def test_criterion_10_scs_round_trip():
    t0 = time.monotonic()
    rng = random.Random(10)
    failures = []
    exact = 0
    for k in range(100):
        scs = _random_scs(rng)
        r_star, z = scs_brute_force(scs)
        rs, rmap = scs_to_rs(scs)
        epoch = supersequence_to_schedule(rmap, list(z))
        span = makespan(rs, epoch)
        if span > (2**scs.rho) * r_star:
            failures.append(f"#{k}: epoch makespan {span} > 2^rho r*")

        # lift an optimal schedule when the oracle can reach it, else the epochs
        positives = len(rs.positive_jobs())
        if positives <= 9:
            tau, sched = brute_force_optimal(rs)
            exact += 1
        else:
            tau, sched = span, epoch
        lifted = schedule_to_supersequence(rmap, sched)
        if not is_supersequence(lifted, scs.sequences):
            failures.append(f"#{k}: lifted word not a supersequence")
        if not len(lifted) <= 2 * Fraction(tau, 2**scs.rho) <= 2 * r_star:
            failures.append(
                f"#{k}: |X|={len(lifted)}, tau={tau}, r*={r_star} break the bound chain"
            )
    elapsed = time.monotonic() - t0
    ok = not failures and elapsed < 300
    _report(10, ok, f"100 instances ({exact} with exact optimum), {len(failures)} failures, {elapsed:.1f}s")
    assert ok, failures[:5]


def test_criterion_11_lts_pipeline():
    t0 = time.monotonic()
    failures = []

    # worked example: machine alternation pays l(m1) + l(m2) + l(m1)
    worked = LtsInstance(((1, 1), (2, 2)), {0: 1, 1: 2, 2: 1}, frozenset({(0, 1), (1, 2)}))
    cost, _sol = lts_brute_force(worked)
    if cost != 1 + 2 + 1:
        failures.append(f"worked example cost {cost} != 4")

    rng = random.Random(11)
    for k in range(100):
        lts = _random_lts(rng)
        validate_lts(lts)
        n = len(lts.jobs)

        resolved, iterations = resolve_bonded_edges(lts)
        if iterations > n * n:
            failures.append(f"#{k}: {iterations} rewrites > n^2")
        before, _ = lts_brute_force(lts)
        after, _ = lts_brute_force(resolved)
        if before != after:
            failures.append(f"#{k}: resolve changed cost {before} -> {after}")

        prep = lts_prep(lts)
        rho = len(prep.instance.machines)
        if prep.instance.jobs and max(x for _, x in prep.instance.machines) > n**rho:
            failures.append(f"#{k}: prepared load exceeds n^rho")
        if not prep.instance.jobs:
            continue
        rs, rmap = lts_to_rs(prep.instance)
        c_star, solution = lts_brute_force(prep.instance)
        sched = lts_solution_to_schedule(rmap, solution)
        if not check_feasible(rs, sched).feasible:
            failures.append(f"#{k}: epoch schedule infeasible")
        back = schedule_to_lts_solution(rmap, sched)
        validate_lts_solution(prep.instance, back)
        recovered = sum(
            dict(prep.instance.machines)[mid] for mid, _jobs in back.blocks
        )
        if recovered > 2 * c_star:
            failures.append(f"#{k}: round trip cost {recovered} > 2 c* ({c_star})")

    elapsed = time.monotonic() - t0
    ok = not failures and elapsed < 300
    _report(11, ok, f"100 instances + worked example, {len(failures)} failures, {elapsed:.1f}s")
    assert ok, failures[:5]
