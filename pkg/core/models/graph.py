"""
Operator graph (AOG) data model.

An OperatorGraph is an immutable DAG of typed operator nodes. Edges connect a
producer output port to a numbered input slot of a consumer. Graph outputs
name the nodes (and ports) whose annotation sets are reported as views.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple

import networkx as nx

from .annotations import Schema


class OperatorKind(str, Enum):
    DOC_SOURCE = "DocSource"
    REGEX_EXTRACT = "RegexExtract"
    DICTIONARY_EXTRACT = "DictionaryExtract"
    SELECT = "Select"
    PROJECT = "Project"
    JOIN = "Join"
    UNION = "Union"
    CONSOLIDATE = "Consolidate"
    SINK = "Sink"
    SUBGRAPH_CALL = "SubgraphCall"


EXTRACTION_KINDS = frozenset({OperatorKind.REGEX_EXTRACT, OperatorKind.DICTIONARY_EXTRACT})
RELATIONAL_KINDS = frozenset({
    OperatorKind.SELECT,
    OperatorKind.PROJECT,
    OperatorKind.JOIN,
    OperatorKind.UNION,
    OperatorKind.CONSOLIDATE,
})

# Fixed input arity per kind; None means "one or more, contiguous slots".
INPUT_ARITY: Dict[OperatorKind, Optional[int]] = {
    OperatorKind.DOC_SOURCE: 0,
    OperatorKind.REGEX_EXTRACT: 1,
    OperatorKind.DICTIONARY_EXTRACT: 1,
    OperatorKind.SELECT: 1,
    OperatorKind.PROJECT: 1,
    OperatorKind.JOIN: 2,
    OperatorKind.UNION: None,
    OperatorKind.CONSOLIDATE: 1,
    OperatorKind.SINK: 1,
    OperatorKind.SUBGRAPH_CALL: None,
}


@dataclass(frozen=True)
class OperatorNode:
    id: int
    kind: OperatorKind
    params: Dict[str, Any] = field(default_factory=dict)
    output_schema: Optional[Schema] = None
    view: Optional[str] = None  # defining view name, when lowered from AQL

    def with_schema(self, schema: Schema) -> "OperatorNode":
        return replace(self, output_schema=schema)

    @property
    def label(self) -> str:
        return f"{self.kind.value}#{self.id}" + (f"({self.view})" if self.view else "")


@dataclass(frozen=True, order=True)
class Edge:
    producer: int
    consumer: int
    slot: int
    port: int = 0


@dataclass(frozen=True, order=True)
class OutputRef:
    node: int
    port: int = 0
    view: str = ""


@dataclass(frozen=True)
class OperatorGraph:
    nodes: Dict[int, OperatorNode]
    edges: Tuple[Edge, ...]
    outputs: Tuple[OutputRef, ...]

    @classmethod
    def build(
        cls,
        nodes: Iterable[OperatorNode],
        edges: Iterable[Edge],
        outputs: Iterable[OutputRef],
    ) -> "OperatorGraph":
        """Construct with canonical ordering of nodes, edges and outputs."""
        node_map = {n.id: n for n in sorted(nodes, key=lambda n: n.id)}
        return cls(node_map, tuple(sorted(set(edges))), tuple(outputs))

    @property
    def node_ids(self) -> List[int]:
        return sorted(self.nodes)

    def node(self, node_id: int) -> OperatorNode:
        return self.nodes[node_id]

    def inputs_of(self, node_id: int) -> List[Edge]:
        return sorted((e for e in self.edges if e.consumer == node_id), key=lambda e: e.slot)

    def consumers_of(self, node_id: int) -> List[Edge]:
        return [e for e in self.edges if e.producer == node_id]

    def nodes_of_kind(self, *kinds: OperatorKind) -> List[int]:
        return [i for i in self.node_ids if self.nodes[i].kind in kinds]

    def output_node_ids(self) -> List[int]:
        return sorted({o.node for o in self.outputs})

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.node_ids)
        graph.add_edges_from(
            (e.producer, e.consumer) for e in self.edges
            if e.producer in self.nodes and e.consumer in self.nodes
        )
        return graph
