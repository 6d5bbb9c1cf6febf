"""
Schema inference - compute each node's output schema from its inputs.

All schemas are known at compile time; inference walks the graph in
topological order and applies one rule per operator kind.
"""

from typing import List

from ..exceptions import SchemaError
from ..models.annotations import ColumnType, Schema
from ..models.graph import EXTRACTION_KINDS, OperatorGraph, OperatorKind, OperatorNode
from ..models.predicates import (
    Contains,
    Follows,
    MatchesRegex,
    Overlaps,
    Predicate,
    SpanLengthGreaterThan,
    predicate_from_json,
)
from .ordering import topo_order
from .validation import validate_graph

DOCUMENT_SCHEMA = Schema.of(("text", ColumnType.TEXT))
DEFAULT_MATCH_COLUMN = "match"


def check_predicate(predicate: Predicate, schema: Schema) -> None:
    """Raise SchemaError if the predicate references unknown or mistyped columns."""
    for name in predicate.columns():
        schema.index_of(name)

    def require(name: str, *types: ColumnType) -> None:
        actual = schema.type_of(name)
        if actual not in types:
            raise SchemaError(
                f"type mismatch in predicate: column {name!r} is {actual.value}, "
                f"expected {' or '.join(t.value for t in types)}"
            )

    def walk(node: Predicate) -> None:
        if isinstance(node, (Follows, Overlaps)):
            require(node.left, ColumnType.SPAN)
            require(node.right, ColumnType.SPAN)
        elif isinstance(node, Contains):
            require(node.outer, ColumnType.SPAN)
            require(node.inner, ColumnType.SPAN)
        elif isinstance(node, SpanLengthGreaterThan):
            require(node.column, ColumnType.SPAN)
        elif isinstance(node, MatchesRegex):
            require(node.column, ColumnType.SPAN, ColumnType.TEXT)
        else:
            for child in vars(node).values():
                if isinstance(child, Predicate):
                    walk(child)

    walk(predicate)


def node_output_schema(node: OperatorNode, inputs: List[Schema]) -> Schema:
    """Apply the inference rule for one node given its input schemas (slot order)."""
    kind = node.kind
    params = node.params

    if kind == OperatorKind.DOC_SOURCE:
        return DOCUMENT_SCHEMA
    if kind in EXTRACTION_KINDS:
        return Schema.of((params.get("column", DEFAULT_MATCH_COLUMN), ColumnType.SPAN))
    if kind == OperatorKind.SELECT:
        check_predicate(predicate_from_json(params["predicate"]), inputs[0])
        return inputs[0]
    if kind == OperatorKind.PROJECT:
        return inputs[0].project(params["columns"])
    if kind == OperatorKind.JOIN:
        left, right = inputs
        joined = left.concat(right)
        predicate = predicate_from_json(params["predicate"])
        check_predicate(predicate, joined)
        referenced = predicate.columns()
        left_names = set(joined.names[:left.arity])
        if not referenced & left_names or not referenced - left_names:
            raise SchemaError(f"join predicate of node {node.id} must reference both inputs")
        return joined
    if kind == OperatorKind.UNION:
        first = inputs[0]
        for other in inputs[1:]:
            if other != first:
                raise SchemaError(f"schema mismatch on Union node {node.id}: {first} vs {other}")
        return first
    if kind == OperatorKind.CONSOLIDATE:
        schema = inputs[0]
        if schema.arity == 0 or schema.columns[0].type != ColumnType.SPAN:
            raise SchemaError(f"Consolidate node {node.id} needs a Span as first column, got {schema}")
        return schema
    if kind == OperatorKind.SINK:
        return inputs[0]
    if kind == OperatorKind.SUBGRAPH_CALL:
        return subgraph_call_port_schema(node, 0)
    raise SchemaError(f"no inference rule for {kind}")


def subgraph_call_port_schema(node: OperatorNode, port: int) -> Schema:
    schemas = node.params.get("output_schemas")
    if not schemas or port >= len(schemas):
        raise SchemaError(f"SubgraphCall node {node.id} declares no schema for port {port}")
    return Schema.from_list(schemas[port])


def producer_schema(graph: OperatorGraph, producer: int, port: int) -> Schema:
    node = graph.nodes[producer]
    if node.kind == OperatorKind.SUBGRAPH_CALL:
        return subgraph_call_port_schema(node, port)
    if node.output_schema is None:
        raise SchemaError(f"schema of node {producer} not inferred")
    return node.output_schema


def infer_schemas(graph: OperatorGraph) -> OperatorGraph:
    """Return a copy of the graph with every node's output_schema populated."""
    validate_graph(graph).raise_if_failed()
    inferred = dict(graph.nodes)
    for node_id in topo_order(graph):
        node = inferred[node_id]
        current = OperatorGraph(inferred, graph.edges, graph.outputs)
        inputs = [producer_schema(current, e.producer, e.port) for e in graph.inputs_of(node_id)]
        inferred[node_id] = node.with_schema(node_output_schema(node, inputs))
    return OperatorGraph(inferred, graph.edges, graph.outputs)
