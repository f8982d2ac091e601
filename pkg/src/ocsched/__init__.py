"""Scheduling collective communication over reconfigurable optical fabrics.

The package models a desk-scale cluster whose nodes are joined by a bank of
optical circuit switches.  A collective (ring or Rabenseifner allreduce,
pairwise or Bruck all-to-all) is lowered to a sequence of permutation steps,
and the scheduler decides, per step and per switch, whether the switch
carries traffic or reconfigures ahead toward a later permutation, so that
reconfiguration hides behind transmission instead of stopping the world.
"""

from .baselines import (
    ideal_cct,
    one_shot_allocation,
    one_shot_schedule,
    strawman_schedule,
)
from .bundle import export_schedule_bundle, parse_bundle
from .collectives import (
    ALGORITHMS,
    CollectiveSpec,
    build_config_catalog,
    generate_steps,
    verify_collective_semantics,
)
from .errors import (
    DimensionMismatch,
    EmptySteps,
    Infeasible,
    NumericalBreakdown,
    ParseError,
    RefusesInvalid,
    SchedulingError,
    TooLarge,
)
from .lpfile import export_lp, parse_lp
from .milp import MILPModel, build_model, schedule_bounds
from .model import (
    ConfigCatalog,
    Permutation,
    Scenario,
    Schedule,
    StepPlan,
    make_permutation,
)
from .scenario_io import MODES, ScenarioFile, load_scenario, parse_scenario_text
from .simulate import SimReport, config_trace, simulate
from .solver import (
    SolverReport,
    branch_and_bound,
    brute_force_oracle,
    heuristic_schedule,
)
from .timeline import build_timeline

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "MODES",
    "CollectiveSpec",
    "ConfigCatalog",
    "DimensionMismatch",
    "EmptySteps",
    "Infeasible",
    "MILPModel",
    "NumericalBreakdown",
    "ParseError",
    "Permutation",
    "RefusesInvalid",
    "Scenario",
    "ScenarioFile",
    "Schedule",
    "SchedulingError",
    "SimReport",
    "SolverReport",
    "StepPlan",
    "TooLarge",
    "branch_and_bound",
    "brute_force_oracle",
    "build_config_catalog",
    "build_model",
    "build_timeline",
    "config_trace",
    "export_lp",
    "export_schedule_bundle",
    "generate_steps",
    "heuristic_schedule",
    "ideal_cct",
    "load_scenario",
    "make_permutation",
    "one_shot_allocation",
    "one_shot_schedule",
    "parse_bundle",
    "parse_lp",
    "parse_scenario_text",
    "schedule_bounds",
    "simulate",
    "strawman_schedule",
    "verify_collective_semantics",
    "__version__",
]
