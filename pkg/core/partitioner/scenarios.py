"""
Offload scenarios.

  1. extraction operators only
  2. one maximal convex subgraph: the one holding every extraction node if
     there is one, otherwise the largest
  3. every maximal convex subgraph
"""

from typing import Dict, List, Optional, Set

from loguru import logger

from ..models.graph import EXTRACTION_KINDS, OperatorGraph
from ..models.plan import PartitionPlan
from .capabilities import CapabilitySet, classify
from .convex import maximal_convex_subgraphs
from .rewrite import rewrite

SCENARIOS = (1, 2, 3)

SCENARIO_LABELS: Dict[int, str] = {
    1: "extraction only",
    2: "single maximal convex subgraph",
    3: "all maximal convex subgraphs",
}


def scenario_sets(
    graph: OperatorGraph,
    caps: CapabilitySet,
    scenario: int,
    node_cap: Optional[int] = None,
) -> List[Set[int]]:
    """Node sets a scenario offloads."""
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario}; expected one of {SCENARIOS}")
    flags = classify(graph, caps)
    extraction = {n for n, flag in flags.items() if flag and graph.nodes[n].kind in EXTRACTION_KINDS}

    if scenario == 1:
        extraction_flags = {n: n in extraction for n in flags}
        return maximal_convex_subgraphs(graph, extraction_flags, node_cap)

    sets = maximal_convex_subgraphs(graph, flags, node_cap)
    if scenario == 3 or not sets:
        return sets
    for members in sets:
        if extraction and extraction <= members:
            return [members]
    largest = max(sets, key=len)
    return [largest]


def scenario_plan(
    graph: OperatorGraph,
    caps: CapabilitySet,
    scenario: int,
    node_cap: Optional[int] = None,
) -> PartitionPlan:
    sets = scenario_sets(graph, caps, scenario, node_cap)
    plan = rewrite(graph, sets, scenario)
    logger.info(
        f"Scenario {scenario} ({SCENARIO_LABELS[scenario]}): "
        f"{len(plan.offloaded_nodes())} node(s) in {len(plan.subgraphs)} subgraph(s)"
    )
    return plan


def scenario_plans(
    graph: OperatorGraph,
    caps: CapabilitySet,
    node_cap: Optional[int] = None,
) -> List[PartitionPlan]:
    """The three offload scenarios, in order."""
    return [scenario_plan(graph, caps, scenario, node_cap) for scenario in SCENARIOS]
