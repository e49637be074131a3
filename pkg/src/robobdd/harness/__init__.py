from robobdd.harness.evaluate import ClauseResult, Verdict, eval_clause, evaluate_instance, outcome, window
from robobdd.harness.rng import XorShift64Star, hash64, splitmix64
from robobdd.harness.sim import EventTrace, PickPlacePlan, SimResult, StateLog, plan_from_instance, simulate_pick_place
from robobdd.harness.suite import (
    CombinationReport,
    ExecutionRecord,
    RunReport,
    SpeedSummary,
    bind_agent,
    execute,
    execution_seed,
    run_suite,
    summarize_speeds,
)
from robobdd.harness.world import (
    AgentSpec,
    ObjectSpec,
    RunConfig,
    SweepPoint,
    WorkspaceSpec,
    WorldConfig,
    WorldState,
    sample_world,
    world_config,
)
