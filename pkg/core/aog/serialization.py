"""
AOG interchange format (version 1) and its plan-file extension.

Documents are modelled with pydantic and emitted as canonical JSON (sorted
keys, nodes by id, edges sorted), so re-serializing a parsed document is
byte-identical.
"""

import json
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..exceptions import AogFormatError, UnknownOperatorKindError
from ..models.annotations import Schema
from ..models.graph import Edge, OperatorGraph, OperatorKind, OperatorNode, OutputRef
from ..models.plan import BoundaryInput, BoundaryOutput, PartitionPlan, Subgraph, parse_location
from .validation import validate_graph

AOG_VERSION = 1


class NodeDocument(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    id: int = Field(ge=0)
    kind: str
    params: Dict[str, Any] = Field(default_factory=dict)
    view: Optional[str] = None
    output_schema: Optional[List[List[str]]] = Field(default=None, alias="schema")


class AogDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    aog_version: int
    nodes: List[NodeDocument]
    edges: List[List[int]] = Field(default_factory=list)
    outputs: List[Union[int, List[int]]] = Field(default_factory=list)
    output_views: List[str] = Field(default_factory=list)


class BoundaryInputDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    slot: int
    producer: int
    port: int = 0
    schema_columns: List[List[str]] = Field(alias="schema")
    consumers: List[List[int]]
    document: bool = False


class BoundaryOutputDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    port: int
    node: int
    schema_columns: List[List[str]] = Field(alias="schema")


class SubgraphDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: int
    call_node: int
    nodes: List[NodeDocument]
    edges: List[List[int]] = Field(default_factory=list)
    inputs: List[BoundaryInputDocument]
    outputs: List[BoundaryOutputDocument]


class PlanDocument(AogDocument):
    subgraphs: List[SubgraphDocument] = Field(default_factory=list)
    location: Dict[str, str] = Field(default_factory=dict)
    scenario: Optional[int] = None


# Model <-> document conversion

def _kind(name: str) -> OperatorKind:
    try:
        return OperatorKind(name)
    except ValueError:
        raise UnknownOperatorKindError(name)


def _node_document(node: OperatorNode) -> NodeDocument:
    return NodeDocument(
        id=node.id,
        kind=node.kind.value,
        params=node.params,
        view=node.view,
        output_schema=node.output_schema.to_list() if node.output_schema is not None else None,
    )


def _node_from_document(doc: NodeDocument) -> OperatorNode:
    try:
        schema = Schema.from_list(doc.output_schema) if doc.output_schema is not None else None
    except ValueError as exc:
        raise AogFormatError(f"node {doc.id}: bad schema: {exc}")
    return OperatorNode(doc.id, _kind(doc.kind), dict(doc.params), schema, doc.view)


def _edge_list(edge: Edge) -> List[int]:
    base = [edge.producer, edge.consumer, edge.slot]
    return base + [edge.port] if edge.port else base


def _edge_from_list(data: List[int]) -> Edge:
    if len(data) not in (3, 4):
        raise AogFormatError(f"edge {data} must be [producer, consumer, slot(, port)]")
    return Edge(*data)


def _output_from_document(data: Union[int, List[int]], view: str) -> OutputRef:
    if isinstance(data, int):
        return OutputRef(data, 0, view)
    if len(data) != 2:
        raise AogFormatError(f"output {data} must be a node id or [node, port]")
    return OutputRef(data[0], data[1], view)


def graph_to_document(graph: OperatorGraph) -> Dict[str, Any]:
    doc = AogDocument(
        aog_version=AOG_VERSION,
        nodes=[_node_document(graph.nodes[i]) for i in graph.node_ids],
        edges=[_edge_list(e) for e in sorted(graph.edges)],
        outputs=[o.node if o.port == 0 else [o.node, o.port] for o in graph.outputs],
        output_views=[o.view for o in graph.outputs],
    )
    return doc.model_dump(by_alias=True, exclude_none=True)


def graph_from_document(doc: AogDocument) -> OperatorGraph:
    if doc.aog_version != AOG_VERSION:
        raise AogFormatError(f"schema-version mismatch: expected {AOG_VERSION}, got {doc.aog_version}")
    nodes = [_node_from_document(n) for n in doc.nodes]
    ids = [n.id for n in nodes]
    if len(set(ids)) != len(ids):
        raise AogFormatError("duplicate node ids")
    views = doc.output_views or [""] * len(doc.outputs)
    if len(views) != len(doc.outputs):
        raise AogFormatError("output_views must parallel outputs")
    return OperatorGraph.build(
        nodes,
        [_edge_from_list(e) for e in doc.edges],
        [_output_from_document(o, v) for o, v in zip(doc.outputs, views)],
    )


def _dumps(data: Dict[str, Any]) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _parse(model: type, text: str) -> Any:
    try:
        return model.model_validate_json(text)
    except ValidationError as exc:
        raise AogFormatError(f"malformed document: {exc.errors()[0]['msg']} at {exc.errors()[0]['loc']}")


def serialize_aog(graph: OperatorGraph) -> str:
    """Canonical JSON text for a valid graph."""
    validate_graph(graph).raise_if_failed()
    return _dumps(graph_to_document(graph))


def deserialize_aog(text: str) -> OperatorGraph:
    return graph_from_document(_parse(AogDocument, text))


# Plans

def _subgraph_document(subgraph: Subgraph) -> SubgraphDocument:
    return SubgraphDocument(
        id=subgraph.id,
        call_node=subgraph.call_node,
        nodes=[_node_document(subgraph.nodes[i]) for i in subgraph.node_ids],
        edges=[_edge_list(e) for e in sorted(subgraph.edges)],
        inputs=[
            BoundaryInputDocument(
                slot=i.slot,
                producer=i.producer,
                port=i.producer_port,
                schema=i.schema.to_list(),
                consumers=[list(c) for c in i.consumers],
                document=i.document,
            )
            for i in subgraph.inputs
        ],
        outputs=[
            BoundaryOutputDocument(port=o.port, node=o.node, schema=o.schema.to_list())
            for o in subgraph.outputs
        ],
    )


def _subgraph_from_document(doc: SubgraphDocument) -> Subgraph:
    nodes = {n.id: _node_from_document(n) for n in doc.nodes}
    return Subgraph(
        id=doc.id,
        call_node=doc.call_node,
        nodes=dict(sorted(nodes.items())),
        edges=tuple(sorted(_edge_from_list(e) for e in doc.edges)),
        inputs=tuple(
            BoundaryInput(
                slot=i.slot,
                producer=i.producer,
                producer_port=i.port,
                schema=Schema.from_list(i.schema_columns),
                consumers=tuple((c[0], c[1]) for c in i.consumers),
                document=i.document,
            )
            for i in doc.inputs
        ),
        outputs=tuple(
            BoundaryOutput(port=o.port, node=o.node, schema=Schema.from_list(o.schema_columns))
            for o in doc.outputs
        ),
    )


def serialize_plan(plan: PartitionPlan) -> str:
    data = graph_to_document(plan.supergraph)
    data["subgraphs"] = [
        _subgraph_document(sg).model_dump(by_alias=True, exclude_none=True) for sg in plan.subgraphs
    ]
    data["location"] = {str(node): loc for node, loc in sorted(plan.location.items())}
    if plan.scenario is not None:
        data["scenario"] = plan.scenario
    return _dumps(data)


def deserialize_plan(text: str) -> PartitionPlan:
    doc = _parse(PlanDocument, text)
    supergraph = graph_from_document(doc)
    try:
        location = {int(node): loc for node, loc in doc.location.items()}
        for loc in location.values():
            parse_location(loc)
    except ValueError as exc:
        raise AogFormatError(f"bad location map: {exc}")
    return PartitionPlan(
        supergraph=supergraph,
        subgraphs=tuple(_subgraph_from_document(sg) for sg in doc.subgraphs),
        location=location,
        scenario=doc.scenario,
    )
