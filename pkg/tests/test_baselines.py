from __future__ import annotations

from fractions import Fraction

import pytest

from presched import (
    Job,
    LtsInstance,
    LtsSolution,
    SchedError,
    ScsInstance,
    assemble_instance,
    brute_force_optimal,
    check_feasible,
    gadget_offline_schedule,
    gen_greedy_killer,
    gen_multiresource_lb,
    gen_online_lb_gadget,
    greedy_killer_offline_schedule,
    is_supersequence,
    lts_brute_force,
    lts_cost,
    makespan,
    multiresource_offline_schedule,
    run_greedy,
    run_onl,
    scs_brute_force,
    validate_lts,
    validate_lts_solution,
)

HALF = Fraction(1, 2)
ONE = Fraction(1)


def _inst(durations, edges=(), demands=None, budgets=(ONE,)):
    jobs = []
    for i, dur in enumerate(durations):
        dem = demands[i] if demands is not None else HALF
        jobs.append(Job(i, dur, (dem,) * len(budgets)))
    return assemble_instance(jobs, edges, budgets)


# brute force oracle, pinned on hand-computable cases


def test_brute_force_single_job():
    opt, sched = brute_force_optimal(_inst([5]))
    assert opt == 5
    assert sched.start(0) == 0


def test_brute_force_parallel_pair():
    inst = _inst([3, 3])
    opt, sched = brute_force_optimal(inst)
    assert opt == 3
    assert check_feasible(inst, sched).feasible


def test_brute_force_serialises_heavy_pair():
    inst = _inst([3, 3], demands=[Fraction(2, 3), Fraction(2, 3)])
    opt, sched = brute_force_optimal(inst)
    assert opt == 6
    assert check_feasible(inst, sched).feasible


def test_brute_force_diamond_with_contention():
    # root, two heavy mids that cannot overlap, sink
    inst = _inst(
        [1, 2, 2, 1],
        edges=[(0, 1), (0, 2), (1, 3), (2, 3)],
        demands=[HALF, Fraction(2, 3), Fraction(2, 3), HALF],
    )
    opt, sched = brute_force_optimal(inst)
    assert opt == 6
    assert check_feasible(inst, sched).feasible


def test_brute_force_zero_jobs_are_free():
    inst = _inst([0, 3], edges=[(0, 1)])
    opt, sched = brute_force_optimal(inst)
    assert opt == 3
    assert check_feasible(inst, sched).feasible


def test_brute_force_zero_job_waits_for_boundary():
    # demanding zero job cannot sit inside the positive's interval,
    # but the boundary instants cost nothing extra
    jobs = [Job(0, 2, (ONE,)), Job(1, 0, (ONE,))]
    inst = assemble_instance(jobs, [], (ONE,))
    opt, sched = brute_force_optimal(inst)
    assert opt == 2
    assert check_feasible(inst, sched).feasible


def test_brute_force_respects_positive_limit():
    inst = _inst([1] * 4)
    with pytest.raises(SchedError) as err:
        brute_force_optimal(inst, limit=3)
    assert err.value.code == "TOO_LARGE"
    # zero jobs do not count against the limit; only two halves fit at once
    mixd = _inst([1, 1, 1, 0, 0])
    opt, _ = brute_force_optimal(mixd, limit=3)
    assert opt == 2


def test_brute_force_matches_critical_path_on_chain():
    inst = _inst([1, 2, 4], edges=[(0, 1), (1, 2)])
    opt, _ = brute_force_optimal(inst)
    assert opt == 7


# family baselines


def test_killer_greedy_versus_offline():
    online = gen_greedy_killer(8)
    _sched, log = run_greedy(online)
    assert log.makespan == 72  # n^2 + n
    off = greedy_killer_offline_schedule(online)
    assert check_feasible(online.instance, off).feasible
    assert makespan(online.instance, off) == 23  # 3n - 1


def test_killer_offline_small():
    online = gen_greedy_killer(4)
    off = greedy_killer_offline_schedule(online)
    assert check_feasible(online.instance, off).feasible
    assert makespan(online.instance, off) == 11


def test_gadget_offline_beats_onl():
    online = gen_online_lb_gadget(2, seed=0)
    off = gadget_offline_schedule(online)
    assert check_feasible(online.instance, off).feasible
    assert makespan(online.instance, off) == 36
    _sched, trace = run_onl(online)
    assert trace.makespan == 44


def test_multiresource_offline_value():
    online = gen_multiresource_lb(2, 4, seed=0)
    off = multiresource_offline_schedule(online)
    assert check_feasible(online.instance, off).feasible
    assert makespan(online.instance, off) == 5  # d - 1 + m
    _sched, log = run_greedy(online)
    assert log.makespan == 8


def test_offline_constructions_demand_matching_family():
    killer = gen_greedy_killer(4)
    with pytest.raises(SchedError) as err:
        gadget_offline_schedule(killer)
    assert err.value.code == "MISSING_METADATA"


# shortest common supersequence oracle


def test_scs_known_values():
    assert scs_brute_force(ScsInstance(2, ((1, 2), (2, 1))))[0] == 3
    assert scs_brute_force(ScsInstance(1, ((1,), (1,))))[0] == 1
    assert scs_brute_force(ScsInstance(3, ((1, 2, 3),)))[0] == 3
    assert scs_brute_force(ScsInstance(2, ()))[0] == 0


def test_scs_witness_is_a_supersequence():
    scs = ScsInstance(3, ((1, 2), (2, 3), (3, 1)))
    length, z = scs_brute_force(scs)
    assert len(z) == length
    assert is_supersequence(z, scs.sequences)


def test_scs_limit():
    scs = ScsInstance(2, (tuple([1, 2] * 20),))
    with pytest.raises(SchedError) as err:
        scs_brute_force(scs, limit=10)
    assert err.value.code == "TOO_LARGE"


def test_is_supersequence():
    assert is_supersequence((1, 2, 1), ((1, 2), (2, 1)))
    assert not is_supersequence((1, 2), ((2, 1),))
    assert is_supersequence((), ())


# loading-time scheduling oracle


def _worked_lts():
    return LtsInstance(
        machines=((10, 1), (20, 2)),
        jobs={0: 10, 1: 20, 2: 10},
        edges=frozenset({(0, 1), (1, 2)}),
    )


def test_lts_cost_counts_block_loads():
    lts = _worked_lts()
    solution = LtsSolution(((10, (0,)), (20, (1,)), (10, (2,))))
    assert lts_cost(lts, solution) == 4


def test_lts_brute_force_worked_example():
    # alternation forces three loads: l1 + l2 + l1
    cost, solution = lts_brute_force(_worked_lts())
    assert cost == 4
    validate_lts_solution(_worked_lts(), solution)


def test_lts_brute_force_batches_same_machine():
    lts = LtsInstance(
        machines=((10, 1), (20, 2)),
        jobs={0: 10, 1: 20, 2: 10},
        edges=frozenset({(0, 2)}),
    )
    cost, solution = lts_brute_force(lts)
    assert cost == 3  # both machine-10 jobs ride one load
    validate_lts_solution(lts, solution)


def test_lts_brute_force_limit():
    lts = LtsInstance(
        machines=((1, 1),),
        jobs={i: 1 for i in range(20)},
        edges=frozenset(),
    )
    with pytest.raises(SchedError) as err:
        lts_brute_force(lts, limit=10)
    assert err.value.code == "TOO_LARGE"


def test_validate_lts_rejects_malformed_input():
    with pytest.raises(SchedError):
        validate_lts(LtsInstance(((1, 1), (1, 2)), {0: 1}, frozenset()))
    with pytest.raises(SchedError) as err:
        validate_lts(LtsInstance(((1, 0),), {0: 1}, frozenset()))
    assert err.value.code == "BAD_LOADS"
    with pytest.raises(SchedError) as err:
        validate_lts(LtsInstance(((1, 1),), {0: 1}, frozenset({(0, 9)})))
    assert err.value.code == "MISSING_JOB"
    with pytest.raises(SchedError) as err:
        validate_lts(LtsInstance(((1, 1),), {0: 1, 1: 1}, frozenset({(0, 1), (1, 0)})))
    assert err.value.code == "CYCLE"


def test_validate_lts_solution_rejects_bad_blocks():
    lts = _worked_lts()
    with pytest.raises(SchedError) as err:
        validate_lts_solution(lts, LtsSolution(((10, (0, 1)), (10, (2,)))))
    assert err.value.code == "INVALID_SOLUTION"  # job 1 is not a machine-10 job
    with pytest.raises(SchedError) as err:
        validate_lts_solution(lts, LtsSolution(((10, (0,)), (20, (1,)))))
    assert err.value.code == "INVALID_SOLUTION"  # job 2 missing
    with pytest.raises(SchedError) as err:
        validate_lts_solution(
            lts, LtsSolution(((10, (2,)), (20, (1,)), (10, (0,))))
        )
    assert err.value.code == "INVALID_SOLUTION"  # order contradicts 0 < 1 < 2


def test_validate_lts_solution_allows_in_block_edges():
    lts = LtsInstance(
        machines=((10, 1), (20, 2)),
        jobs={0: 10, 1: 20, 2: 10},
        edges=frozenset({(0, 2)}),
    )
    validate_lts_solution(lts, LtsSolution(((10, (0, 2)), (20, (1,)))))
