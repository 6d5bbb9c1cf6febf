"""Partition plan model: supergraph, accelerated subgraphs and node locations."""

from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from .annotations import Schema
from .graph import Edge, OperatorGraph, OperatorNode

HOST = "host"


def accelerator_location(subgraph_id: int) -> str:
    return f"accelerator:{subgraph_id}"


def parse_location(location: str) -> Optional[int]:
    """Subgraph id for an accelerator location, None for the host."""
    if location == HOST:
        return None
    prefix, _, index = location.partition(":")
    if prefix != "accelerator" or not index.isdigit():
        raise ValueError(f"invalid location {location!r}")
    return int(index)


@dataclass(frozen=True)
class BoundaryInput:
    """One SubgraphCall input slot fed by a supergraph producer."""
    slot: int
    producer: int
    producer_port: int
    schema: Schema
    consumers: Tuple[Tuple[int, int], ...]  # (node inside the subgraph, its input slot)
    document: bool = False


@dataclass(frozen=True)
class BoundaryOutput:
    """One SubgraphCall output port carrying a subgraph node's result."""
    port: int
    node: int
    schema: Schema


@dataclass(frozen=True)
class Subgraph:
    id: int
    call_node: int
    nodes: Dict[int, OperatorNode]
    edges: Tuple[Edge, ...]
    inputs: Tuple[BoundaryInput, ...]
    outputs: Tuple[BoundaryOutput, ...]

    @property
    def node_ids(self) -> List[int]:
        return sorted(self.nodes)

    def inputs_of(self, node_id: int) -> List[Edge]:
        return sorted((e for e in self.edges if e.consumer == node_id), key=lambda e: e.slot)


@dataclass(frozen=True)
class PartitionPlan:
    supergraph: OperatorGraph
    subgraphs: Tuple[Subgraph, ...]
    location: Dict[int, str]
    scenario: Optional[int] = None

    def subgraph(self, subgraph_id: int) -> Subgraph:
        for subgraph in self.subgraphs:
            if subgraph.id == subgraph_id:
                return subgraph
        raise KeyError(f"unknown subgraph {subgraph_id}")

    def offloaded_nodes(self) -> Set[int]:
        return {node for sg in self.subgraphs for node in sg.nodes}

    @classmethod
    def software_only(cls, graph: OperatorGraph) -> "PartitionPlan":
        """Identity plan: everything runs on the host."""
        return cls(graph, (), {node_id: HOST for node_id in graph.node_ids})
