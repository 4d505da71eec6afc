"""Multi-robot planning for hierarchical LTLf specifications."""

from .automata import Nfa, decomposition_set, progress_metric, translate
from .hierarchy import (HierarchySpec, SpecError, StateSpecSequence, check_bounded_one_time,
                        generate_output_word, infer_temporal_order, load_spec, output_words,
                        parse_spec, satisfies)
from .ltlf import evaluate, holds_on_empty, parse_formula, progress
from .planner import (InfeasibleError, PlannerOptions, PlanningContext, PlanningError,
                      PlanningTimeout, PlanResult, StateCapExceeded, plan)
from .scenario import Scenario, load_scenario
from .world import GridMap, RobotConfig, TransitionSystem, build_ts, load_map, load_profiles, product

__all__ = [
    "Nfa", "decomposition_set", "progress_metric", "translate",
    "HierarchySpec", "SpecError", "StateSpecSequence", "check_bounded_one_time",
    "generate_output_word", "infer_temporal_order", "load_spec", "output_words",
    "parse_spec", "satisfies",
    "evaluate", "holds_on_empty", "parse_formula", "progress",
    "InfeasibleError", "PlannerOptions", "PlanningContext", "PlanningError",
    "PlanningTimeout", "PlanResult", "StateCapExceeded", "plan",
    "Scenario", "load_scenario",
    "GridMap", "RobotConfig", "TransitionSystem", "build_ts", "load_map", "load_profiles", "product",
]
