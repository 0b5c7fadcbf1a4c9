"""Eco-driving and hybrid power-split simulation for signalized corridors.

The package plans speed trajectories through a corridor of timed
signals, splits the resulting traction demand between engine and
battery (a rule-based controller or backward dynamic programming over
state of charge), and integrates coolant, catalyst, and tailpipe
emission models along the trip.  The :mod:`ecosplit.harness` module ties
it all together for single cases and seeded fleet comparisons.
"""
from .config import (
    Scenario,
    config_digest,
    default_corridor,
    default_light_off_curves,
    default_scenario,
    load_scenario,
    save_scenario,
)
from .dp import DpProblem, DpSolution, TerminalCost, charge_sustain_check, solve
from .errors import (
    ConfigError,
    EcosplitError,
    EqualDensity,
    InfeasibleDemand,
    NoFeasiblePolicy,
    NoWindowInHorizon,
    OutOfEnvelope,
    ZeroBaseline,
)
from .harness import (
    BatchResult,
    CaseResult,
    TripPlan,
    combo_means,
    emission_improvement,
    equivalent_energy,
    export,
    improvement_indices,
    plan_trip,
    run_batch,
    run_case,
)
from .planner import (
    LegPlan,
    Mode,
    PlannerContext,
    SpeedProfile,
    plan_baseline_profile,
    plan_eco_profile,
)
from .powertrain import (
    ControlDecision,
    EngineOp,
    PowertrainConfig,
    PowertrainState,
    rule_based_split,
    traction_power,
)
from .thermal import EmissionRates, catalyst_step, conversion_efficiency, tailpipe_step
from .traffic import (
    Corridor,
    GreenWindow,
    Intersection,
    SignalTiming,
    evolve_queue,
    predict_green_window,
)

__version__ = "0.1.0"

__all__ = [
    "BatchResult",
    "CaseResult",
    "ConfigError",
    "ControlDecision",
    "Corridor",
    "DpProblem",
    "DpSolution",
    "EcosplitError",
    "EmissionRates",
    "EngineOp",
    "EqualDensity",
    "GreenWindow",
    "InfeasibleDemand",
    "Intersection",
    "LegPlan",
    "Mode",
    "NoFeasiblePolicy",
    "NoWindowInHorizon",
    "OutOfEnvelope",
    "PlannerContext",
    "PowertrainConfig",
    "PowertrainState",
    "Scenario",
    "SignalTiming",
    "SpeedProfile",
    "TerminalCost",
    "TripPlan",
    "ZeroBaseline",
    "charge_sustain_check",
    "catalyst_step",
    "combo_means",
    "config_digest",
    "conversion_efficiency",
    "default_corridor",
    "default_light_off_curves",
    "default_scenario",
    "emission_improvement",
    "equivalent_energy",
    "evolve_queue",
    "export",
    "improvement_indices",
    "load_scenario",
    "plan_baseline_profile",
    "plan_eco_profile",
    "plan_trip",
    "predict_green_window",
    "rule_based_split",
    "run_batch",
    "run_case",
    "save_scenario",
    "solve",
    "tailpipe_step",
    "traction_power",
    "__version__",
]
