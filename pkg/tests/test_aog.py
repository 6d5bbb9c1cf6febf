"""
Tests for the operator graph model: validation, ordering, schema inference and the AOG format.
"""

import json
import random

import pytest

from core.aog import AOG_VERSION, deserialize_aog, deserialize_plan, infer_schemas, serialize_aog, serialize_plan
from core.aog import topo_order, validate_graph
from core.aog.schemas import node_output_schema
from core.exceptions import (
    AogFormatError,
    GraphCycleError,
    GraphValidationError,
    SchemaError,
    UnknownOperatorKindError,
)
from core.models.annotations import ColumnType, Schema
from core.models.graph import Edge, OperatorGraph, OperatorKind, OperatorNode, OutputRef
from core.models.predicates import predicate_from_json
from core.partitioner import scenario_plan

DOC = OperatorKind.DOC_SOURCE
REGEX = OperatorKind.REGEX_EXTRACT


def _regex(node_id, column="match"):
    params = {"pattern": "[a-z]+"}
    if column != "match":
        params["column"] = column
    return OperatorNode(node_id, REGEX, params)


def _chain_graph():
    return OperatorGraph.build(
        [
            OperatorNode(0, DOC),
            _regex(1),
            OperatorNode(2, OperatorKind.SELECT, {"predicate": ["SpanLengthGreaterThan", "match", 1]}),
        ],
        [Edge(0, 1, 0), Edge(1, 2, 0)],
        [OutputRef(2)],
    )


def _random_graph(rng):
    """A valid graph of at most 12 nodes under sparse ids; every sink is an output."""
    extract_kinds = ["regex", "dictionary"]
    nodes, edges, schemas = [OperatorNode(0, DOC)], [], {}
    for node_id in sorted(rng.sample(range(1, 500), rng.randint(1, 11))):
        kind = rng.choice(extract_kinds + (["select", "project", "union", "join", "consolidate"] if schemas else []))
        producers = [0] if kind in extract_kinds else [rng.choice(sorted(schemas))]
        first = schemas.get(producers[0])
        if kind == "regex":
            params = {"pattern": rng.choice(["[a-z]+", "[A-Z][a-z]*", "[0-9]+"]), "column": rng.choice(["match", "a"])}
            node = OperatorNode(node_id, REGEX, params)
        elif kind == "dictionary":
            params = {"dict": f"words{node_id}", "entries": ["ab", "x", "yz"], "column": rng.choice(["match", "b"])}
            node = OperatorNode(node_id, OperatorKind.DICTIONARY_EXTRACT, params)
        elif kind == "select":
            predicate = ["SpanLengthGreaterThan", rng.choice(first.names), rng.randint(0, 4)]
            node = OperatorNode(node_id, OperatorKind.SELECT, {"predicate": predicate})
        elif kind == "project":
            columns = rng.sample(first.names, rng.randint(1, first.arity))
            node = OperatorNode(node_id, OperatorKind.PROJECT, {"columns": columns})
        elif kind == "union":
            producers.append(rng.choice([p for p in sorted(schemas) if schemas[p] == first]))
            node = OperatorNode(node_id, OperatorKind.UNION)
        elif kind == "join":
            producers.append(rng.choice(sorted(schemas)))
            joined = first.concat(schemas[producers[1]])
            left, right = joined.names[0], joined.names[first.arity]
            predicate = rng.choice([["Follows", left, right, 0, rng.randint(0, 9)], ["Overlaps", left, right]])
            node = OperatorNode(node_id, OperatorKind.JOIN, {"predicate": predicate})
        else:
            node = OperatorNode(node_id, OperatorKind.CONSOLIDATE, {"policy": "contained_within"})
        nodes.append(node)
        edges.extend(Edge(producer, node_id, slot) for slot, producer in enumerate(producers))
        inputs = [] if kind in extract_kinds else [schemas[p] for p in producers]
        schemas[node_id] = node_output_schema(node, inputs)
    consumed = {edge.producer for edge in edges}
    outputs = [OutputRef(node.id, 0, f"V{node.id}") for node in nodes[1:] if node.id not in consumed]
    return OperatorGraph.build(nodes, edges, outputs)


def _bare(ids, edges):
    """Structure-only graph for ordering tests."""
    return OperatorGraph.build(
        [OperatorNode(i, OperatorKind.SELECT) for i in ids],
        [Edge(p, c, 0) for p, c in edges],
        [],
    )


class TestValidation:
    """Structural graph checks."""

    def test_well_formed_chain(self):
        """A document source, one extraction and a selection validate cleanly."""
        assert validate_graph(_chain_graph()).ok

    def test_cycle_is_reported(self):
        """An edge closing a loop is reported with the nodes on the cycle."""
        graph = OperatorGraph.build(
            [
                OperatorNode(0, DOC),
                _regex(1),
                OperatorNode(2, OperatorKind.UNION),
                OperatorNode(3, OperatorKind.SELECT, {"predicate": ["SpanLengthGreaterThan", "match", 1]}),
            ],
            [Edge(0, 1, 0), Edge(1, 2, 0), Edge(3, 2, 1), Edge(2, 3, 0)],
            [OutputRef(3)],
        )
        report = validate_graph(graph)
        assert not report.ok
        assert "cycle through nodes [2, 3]" in report.messages

    def test_unconnected_join_slot(self):
        """A join with only its left input wired is missing slot 1."""
        graph = OperatorGraph.build(
            [
                OperatorNode(0, DOC),
                _regex(1),
                OperatorNode(4, OperatorKind.JOIN, {"predicate": ["Follows", "match", "match_1", 0, 5]}),
            ],
            [Edge(0, 1, 0), Edge(1, 4, 0)],
            [OutputRef(4)],
        )
        assert "input slot 1 of node 4 unconnected" in validate_graph(graph).messages

    def test_missing_parameter(self):
        """Kind-specific parameters are required."""
        graph = OperatorGraph.build(
            [OperatorNode(0, DOC), OperatorNode(1, REGEX, {})],
            [Edge(0, 1, 0)],
            [OutputRef(1)],
        )
        assert any("missing parameter 'pattern'" in m for m in validate_graph(graph).messages)

    def test_extraction_must_read_document(self):
        """Extraction operators only read the document source."""
        graph = OperatorGraph.build(
            [OperatorNode(0, DOC), _regex(1), _regex(2)],
            [Edge(0, 1, 0), Edge(1, 2, 0)],
            [OutputRef(2)],
        )
        assert "extraction node 2 must read the document source" in validate_graph(graph).messages

    def test_dead_node(self):
        """Nodes that feed no output are flagged."""
        graph = OperatorGraph.build(
            [OperatorNode(0, DOC), _regex(1), _regex(2)],
            [Edge(0, 1, 0), Edge(0, 2, 0)],
            [OutputRef(1)],
        )
        assert "node 2 does not reach any output" in validate_graph(graph).messages

    def test_raise_if_failed(self):
        """Findings turn into an exception on request."""
        graph = OperatorGraph.build([OperatorNode(0, DOC)], [], [])
        with pytest.raises(GraphValidationError, match="graph has no outputs"):
            validate_graph(graph).raise_if_failed()


class TestTopoOrder:
    """Deterministic topological order."""

    def test_chain(self):
        """A chain comes out in path order."""
        assert topo_order(_bare([1, 2, 3], [(1, 2), (2, 3)])) == [1, 2, 3]

    def test_diamond_breaks_ties_by_id(self):
        """Independent nodes are ordered by ascending id."""
        assert topo_order(_bare([1, 2, 3, 4], [(1, 3), (1, 2), (2, 4), (3, 4)])) == [1, 2, 3, 4]

    def test_cycle(self):
        """Cyclic graphs cannot be ordered."""
        with pytest.raises(GraphCycleError):
            topo_order(_bare([1, 2], [(1, 2), (2, 1)]))

    def test_random_dags_order_every_edge_forward(self):
        """On random DAGs every producer precedes its consumers."""
        rng = random.Random(7)
        for _ in range(50):
            size = rng.randint(2, 9)
            labels = rng.sample(range(100), size)
            edges = [
                (labels[i], labels[j])
                for i in range(size) for j in range(i + 1, size)
                if rng.random() < 0.3
            ]
            order = topo_order(_bare(labels, edges))
            assert sorted(order) == sorted(labels)
            position = {node: index for index, node in enumerate(order)}
            assert all(position[p] < position[c] for p, c in edges)

    def test_compiled_graph(self, union_join_graph):
        """Compiled programs order their edges forward too."""
        position = {node: index for index, node in enumerate(topo_order(union_join_graph))}
        assert all(position[e.producer] < position[e.consumer] for e in union_join_graph.edges)


class TestSchemaInference:
    """Output schema rules per operator kind."""

    def test_extraction_schema(self):
        """Extractions produce a single match span."""
        graph = infer_schemas(_chain_graph())
        assert graph.nodes[0].output_schema == Schema.of(("text", ColumnType.TEXT))
        assert graph.nodes[1].output_schema == Schema.of(("match", ColumnType.SPAN))
        assert graph.nodes[2].output_schema == graph.nodes[1].output_schema

    def test_join_concatenates(self):
        """A join emits the left columns followed by the right ones."""
        graph = OperatorGraph.build(
            [
                OperatorNode(0, DOC),
                _regex(1, "a"),
                _regex(2, "b"),
                OperatorNode(3, OperatorKind.JOIN, {"predicate": ["Follows", "a", "b", 0, 5]}),
            ],
            [Edge(0, 1, 0), Edge(0, 2, 0), Edge(1, 3, 0), Edge(2, 3, 1)],
            [OutputRef(3)],
        )
        inferred = infer_schemas(graph)
        assert inferred.nodes[3].output_schema == Schema.of(("a", ColumnType.SPAN), ("b", ColumnType.SPAN))

    def test_concat_renames_collisions(self):
        """Right-side names already taken get a numeric suffix."""
        left = Schema.of(("a", ColumnType.SPAN))
        right = Schema.of(("a", ColumnType.SPAN), ("a_1", ColumnType.SPAN))
        assert left.concat(right).names == ["a", "a_1", "a_1_1"]

    def test_union_schema_mismatch(self):
        """Union inputs must share one schema."""
        graph = OperatorGraph.build(
            [
                OperatorNode(0, DOC),
                _regex(1, "a"),
                _regex(2, "b"),
                OperatorNode(3, OperatorKind.JOIN, {"predicate": ["Follows", "a", "b", 0, 5]}),
                OperatorNode(4, OperatorKind.UNION),
            ],
            [Edge(0, 1, 0), Edge(0, 2, 0), Edge(1, 3, 0), Edge(2, 3, 1), Edge(1, 4, 0), Edge(3, 4, 1)],
            [OutputRef(4)],
        )
        with pytest.raises(SchemaError, match="schema mismatch"):
            infer_schemas(graph)

    def test_predicate_on_unknown_column(self):
        """Selections may only test existing columns."""
        graph = OperatorGraph.build(
            [
                OperatorNode(0, DOC),
                _regex(1),
                OperatorNode(2, OperatorKind.SELECT, {"predicate": ["SpanLengthGreaterThan", "nope", 1]}),
            ],
            [Edge(0, 1, 0), Edge(1, 2, 0)],
            [OutputRef(2)],
        )
        with pytest.raises(SchemaError, match="unknown column 'nope'"):
            infer_schemas(graph)

    def test_inference_is_idempotent(self):
        """Inferring an already inferred graph changes nothing."""
        rng = random.Random(31)
        for _ in range(300):
            once = infer_schemas(_random_graph(rng))
            assert all(node.output_schema is not None for node in once.nodes.values())
            assert infer_schemas(once) == once


class TestSerialization:
    """The AOG interchange format."""

    def test_doc_source_only_round_trip(self):
        """The smallest graph re-serializes byte-identically."""
        graph = OperatorGraph.build([OperatorNode(0, DOC)], [], [OutputRef(0)])
        text = serialize_aog(graph)
        assert serialize_aog(deserialize_aog(text)) == text
        assert json.loads(text)["aog_version"] == AOG_VERSION

    def test_compiled_graph_round_trip(self, caps_numbers_graph):
        """Nodes, edges, schemas and output views survive a round trip."""
        text = serialize_aog(caps_numbers_graph)
        restored = deserialize_aog(text)
        assert restored.edges == caps_numbers_graph.edges
        assert restored.outputs == caps_numbers_graph.outputs
        for node_id in caps_numbers_graph.node_ids:
            original, copy = caps_numbers_graph.nodes[node_id], restored.nodes[node_id]
            assert (copy.kind, copy.params, copy.output_schema, copy.view) == \
                (original.kind, original.params, original.output_schema, original.view)
        assert serialize_aog(restored) == text

    def test_edges_are_triples(self, caps_numbers_graph):
        """Edges are written as [producer, consumer, slot]."""
        data = json.loads(serialize_aog(caps_numbers_graph))
        assert [3, 4, 0] in data["edges"]
        assert data["outputs"] == [4]

    def test_unknown_kind(self):
        """Unknown operator kinds are rejected by name."""
        text = json.dumps({"aog_version": 1, "nodes": [{"id": 0, "kind": "FrobExtract"}], "outputs": [0]})
        with pytest.raises(UnknownOperatorKindError) as info:
            deserialize_aog(text)
        assert info.value.kind == "FrobExtract"

    def test_version_mismatch(self):
        """Only format version 1 is understood."""
        text = json.dumps({"aog_version": 2, "nodes": [{"id": 0, "kind": "DocSource"}], "outputs": [0]})
        with pytest.raises(AogFormatError, match="schema-version mismatch"):
            deserialize_aog(text)

    def test_malformed_json(self):
        """Text that is not an AOG document is a format error."""
        with pytest.raises(AogFormatError):
            deserialize_aog("not json at all")

    def test_plan_round_trip(self, caps_numbers_graph, default_caps):
        """Plan files keep subgraphs, locations and the scenario."""
        plan = scenario_plan(caps_numbers_graph, default_caps, 3)
        text = serialize_plan(plan)
        restored = deserialize_plan(text)
        assert restored.scenario == 3
        assert restored.location == plan.location
        assert [sg.node_ids for sg in restored.subgraphs] == [sg.node_ids for sg in plan.subgraphs]
        assert serialize_plan(restored) == text

    def test_random_graphs_round_trip(self):
        """A thousand random graphs, with and without inferred schemas, come back equal."""
        rng = random.Random(5)
        for _ in range(1000):
            graph = _random_graph(rng)
            if rng.random() < 0.5:
                graph = infer_schemas(graph)
            text = serialize_aog(graph)
            assert deserialize_aog(text) == graph
            assert serialize_aog(deserialize_aog(text)) == text


class TestPredicates:
    """Nested-array predicate notation."""

    def test_round_trip(self):
        """Parsing then printing a predicate gives back the same array."""
        data = ["And", ["Follows", "a", "b", 0, 5], ["Not", ["Overlaps", "a", "b"]]]
        assert predicate_from_json(data).to_json() == data

    def test_unknown_predicate(self):
        """Unknown predicate names are format errors."""
        with pytest.raises(AogFormatError, match="unknown predicate"):
            predicate_from_json(["Near", "a", "b"])

    def test_inverted_gap(self):
        """Follows bounds must be ordered."""
        with pytest.raises(AogFormatError, match="min gap exceeds max gap"):
            predicate_from_json(["Follows", "a", "b", 5, 0])
