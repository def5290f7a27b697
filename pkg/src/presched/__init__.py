"""Precedence-constrained multi-resource scheduling toolkit.

Core model and feasibility checking, an online level-based algorithm with
certified bounds, greedy and exact baselines, adversarial generators, chain
gadgets, reductions to and from supersequence and machine-loading problems,
and a competitive-ratio experiment harness behind an HTTP service.
"""

from .baselines import (
    GreedyScheduler,
    LtsInstance,
    LtsSolution,
    ScsInstance,
    brute_force_optimal,
    gadget_offline_schedule,
    greedy_killer_offline_schedule,
    is_supersequence,
    lts_brute_force,
    lts_cost,
    multiresource_offline_schedule,
    run_greedy,
    scs_brute_force,
    validate_lts,
    validate_lts_solution,
)
from .chains import (
    ChainSpec,
    batch_same_length,
    build_chain,
    chain_instance,
    is_sequential,
    link_chains,
    mixed_type_lower_bound,
    normalize_sequential,
    schedule_same_length_parallel,
    wave_peaks,
)
from .core import (
    FeasibilityReport,
    Instance,
    Job,
    Schedule,
    Violation,
    assemble_instance,
    check_feasible,
    critical_path_end,
    depth_profile,
    inflate_zero_jobs,
    makespan,
    next_pow2,
    round_durations_pow2,
    topological_order,
    transitive_reduction,
    uniform_demand,
    validate_instance,
    work,
)
from .errors import SchedError
from .experiments import (
    ExperimentReport,
    RunRow,
    experiment_competitive,
    gadget_crossing_counts,
    gantt_text,
    to_csv,
)
from .generators import (
    OnlineInstance,
    as_online,
    gen_greedy_killer,
    gen_multiresource_lb,
    gen_online_lb_gadget,
    gen_random_dag,
)
from .onl import (
    OnlScheduler,
    OnlTrace,
    assign_level,
    level_cap,
    onl_makespan_bound,
    opt_lower_bound,
    run_onl,
    sum_cap_bound,
)
from .reductions import (
    EpochSequence,
    LtsPrep,
    ReductionMap,
    bound_loading_times,
    lift_bounded_solution,
    lts_instance_of_map,
    lts_prep,
    lts_solution_to_schedule,
    lts_to_rs,
    resolve_bonded_edges,
    round_and_normalize_loads,
    schedule_to_lts_solution,
    schedule_to_supersequence,
    scs_to_rs,
    supersequence_to_schedule,
    threshold_sequence,
)
from .simulate import SchedulerView, SimLog, simulate_online

__version__ = "0.1.0"

__all__ = [
    "ChainSpec",
    "EpochSequence",
    "ExperimentReport",
    "FeasibilityReport",
    "GreedyScheduler",
    "Instance",
    "Job",
    "LtsInstance",
    "LtsPrep",
    "LtsSolution",
    "OnlScheduler",
    "OnlTrace",
    "OnlineInstance",
    "ReductionMap",
    "RunRow",
    "SchedError",
    "Schedule",
    "SchedulerView",
    "ScsInstance",
    "SimLog",
    "Violation",
    "as_online",
    "assemble_instance",
    "assign_level",
    "batch_same_length",
    "bound_loading_times",
    "brute_force_optimal",
    "build_chain",
    "chain_instance",
    "check_feasible",
    "critical_path_end",
    "depth_profile",
    "experiment_competitive",
    "gadget_crossing_counts",
    "gadget_offline_schedule",
    "gantt_text",
    "gen_greedy_killer",
    "gen_multiresource_lb",
    "gen_online_lb_gadget",
    "gen_random_dag",
    "greedy_killer_offline_schedule",
    "inflate_zero_jobs",
    "is_sequential",
    "is_supersequence",
    "level_cap",
    "lift_bounded_solution",
    "lts_instance_of_map",
    "link_chains",
    "lts_brute_force",
    "lts_cost",
    "lts_prep",
    "lts_solution_to_schedule",
    "lts_to_rs",
    "makespan",
    "mixed_type_lower_bound",
    "multiresource_offline_schedule",
    "next_pow2",
    "normalize_sequential",
    "onl_makespan_bound",
    "opt_lower_bound",
    "resolve_bonded_edges",
    "round_and_normalize_loads",
    "round_durations_pow2",
    "run_greedy",
    "run_onl",
    "schedule_same_length_parallel",
    "schedule_to_lts_solution",
    "schedule_to_supersequence",
    "scs_brute_force",
    "scs_to_rs",
    "simulate_online",
    "sum_cap_bound",
    "supersequence_to_schedule",
    "threshold_sequence",
    "to_csv",
    "topological_order",
    "transitive_reduction",
    "uniform_demand",
    "validate_instance",
    "validate_lts",
    "validate_lts_solution",
    "wave_peaks",
    "work",
]
