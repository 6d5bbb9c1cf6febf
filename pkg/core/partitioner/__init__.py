"""Hardware/software partitioning of operator graphs."""

from .capabilities import PRESETS, CapabilitySet, classify, is_accelerable, load_capabilities
from .convex import ReachabilityIndex, grow_convex_sets, is_convex, maximal_convex_subgraphs
from .rewrite import rewrite, validate_plan
from .scenarios import SCENARIO_LABELS, SCENARIOS, scenario_plan, scenario_plans, scenario_sets

__all__ = [
    "PRESETS",
    "SCENARIOS",
    "SCENARIO_LABELS",
    "CapabilitySet",
    "ReachabilityIndex",
    "classify",
    "grow_convex_sets",
    "is_accelerable",
    "is_convex",
    "load_capabilities",
    "maximal_convex_subgraphs",
    "rewrite",
    "scenario_plan",
    "scenario_plans",
    "scenario_sets",
    "validate_plan",
]
