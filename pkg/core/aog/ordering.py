"""Deterministic topological ordering of operator graphs."""

from typing import List

import networkx as nx

from ..exceptions import GraphCycleError
from ..models.graph import OperatorGraph


def topo_order(graph: OperatorGraph) -> List[int]:
    """Producers before consumers; ties broken by ascending node id."""
    nx_graph = graph.to_networkx()
    try:
        return list(nx.lexicographical_topological_sort(nx_graph))
    except nx.NetworkXUnfeasible:
        cycle = [u for u, _ in nx.find_cycle(nx_graph)]
        raise GraphCycleError(cycle)
