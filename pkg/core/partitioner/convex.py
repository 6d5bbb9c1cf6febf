"""
Convex subgraph extraction.

A node set S is convex when no path between two members leaves S. With
ancestor and descendant bit-sets that is a single test: no outside node may
be both a descendant and an ancestor of S.

Sets are grown greedily. Seeds are taken in topological order (extraction
nodes first), and each set absorbs any unassigned accelerable node whose
addition keeps it convex, repeating until nothing more fits.
"""

from typing import Dict, Iterable, List, Optional, Set

import networkx as nx
from loguru import logger

from ..aog.ordering import topo_order
from ..models.graph import EXTRACTION_KINDS, OperatorGraph


class ReachabilityIndex:
    """Per-node ancestor / descendant masks over a DAG."""

    def __init__(self, dag: nx.DiGraph):
        self.order = list(nx.lexicographical_topological_sort(dag))
        self.bit = {node: 1 << index for index, node in enumerate(self.order)}
        self.descendants: Dict[int, int] = {}
        self.ancestors: Dict[int, int] = {}
        for node in reversed(self.order):
            mask = 0
            for child in dag.successors(node):
                mask |= self.bit[child] | self.descendants[child]
            self.descendants[node] = mask
        for node in self.order:
            mask = 0
            for parent in dag.predecessors(node):
                mask |= self.bit[parent] | self.ancestors[parent]
            self.ancestors[node] = mask

    def mask(self, nodes: Iterable[int]) -> int:
        result = 0
        for node in nodes:
            result |= self.bit[node]
        return result

    def is_convex(self, nodes: Iterable[int]) -> bool:
        members = list(nodes)
        inside = self.mask(members)
        below = above = 0
        for node in members:
            below |= self.descendants[node]
            above |= self.ancestors[node]
        return (below & above & ~inside) == 0


class _GrowingSet:
    def __init__(self, index: ReachabilityIndex, seed: int):
        self.index = index
        self.members: List[int] = [seed]
        self.inside = index.bit[seed]
        self.below = index.descendants[seed]
        self.above = index.ancestors[seed]

    def accepts(self, node: int) -> bool:
        inside = self.inside | self.index.bit[node]
        below = self.below | self.index.descendants[node]
        above = self.above | self.index.ancestors[node]
        return (below & above & ~inside) == 0

    def add(self, node: int) -> None:
        self.members.append(node)
        self.inside |= self.index.bit[node]
        self.below |= self.index.descendants[node]
        self.above |= self.index.ancestors[node]


def grow_convex_sets(
    dag: nx.DiGraph,
    accelerable: Set[int],
    preferred_seeds: Optional[Set[int]] = None,
    node_cap: Optional[int] = None,
) -> List[Set[int]]:
    """Disjoint convex sets covering every accelerable node of ``dag``.

    Seeds from ``preferred_seeds`` are tried first; within each group seeds
    and candidates are visited in topological order, ties by node id.
    """
    index = ReachabilityIndex(dag)
    preferred = preferred_seeds or set()
    candidates = [n for n in index.order if n in accelerable]
    seeds = [n for n in candidates if n in preferred] + [n for n in candidates if n not in preferred]

    assigned: Set[int] = set()
    sets: List[Set[int]] = []
    for seed in seeds:
        if seed in assigned:
            continue
        grown = _GrowingSet(index, seed)
        assigned.add(seed)
        changed = True
        while changed and (node_cap is None or len(grown.members) < node_cap):
            changed = False
            for node in candidates:
                if node_cap is not None and len(grown.members) >= node_cap:
                    break
                if node not in assigned and grown.accepts(node):
                    grown.add(node)
                    assigned.add(node)
                    changed = True
        sets.append(set(grown.members))
    return sets


def maximal_convex_subgraphs(
    graph: OperatorGraph,
    flags: Dict[int, bool],
    node_cap: Optional[int] = None,
) -> List[Set[int]]:
    """Greedy maximal convex sets of accelerable nodes, seeded by extraction operators."""
    missing = set(graph.node_ids) - set(flags)
    if missing:
        raise ValueError(f"accelerable flags missing for nodes {sorted(missing)}")
    topo_order(graph)  # raises GraphCycleError on cyclic input
    accelerable = {node for node, flag in flags.items() if flag}
    extraction = {node for node in accelerable if graph.nodes[node].kind in EXTRACTION_KINDS}
    sets = grow_convex_sets(graph.to_networkx(), accelerable, extraction, node_cap)
    logger.debug(f"Maximal convex subgraphs: {[sorted(s) for s in sets]}")
    return sets


def is_convex(graph: OperatorGraph, nodes: Iterable[int]) -> bool:
    return ReachabilityIndex(graph.to_networkx()).is_convex(nodes)
