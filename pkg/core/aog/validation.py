"""
Graph validation - structural checks over an OperatorGraph.

Findings are data, not failures: ``validate_graph`` never raises, it returns a
report that is empty exactly when every graph invariant holds.
"""

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import networkx as nx

from ..exceptions import AogFormatError, GraphValidationError
from ..models.graph import (
    EXTRACTION_KINDS,
    INPUT_ARITY,
    OperatorGraph,
    OperatorKind,
    OperatorNode,
)
from ..models.predicates import predicate_from_json


@dataclass(frozen=True)
class ValidationFinding:
    message: str
    node_ids: Tuple[int, ...] = ()


@dataclass
class ValidationReport:
    findings: List[ValidationFinding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    @property
    def messages(self) -> List[str]:
        return [f.message for f in self.findings]

    def add(self, message: str, *node_ids: int) -> None:
        self.findings.append(ValidationFinding(message, tuple(node_ids)))

    def raise_if_failed(self) -> None:
        if self.findings:
            raise GraphValidationError(self.messages)


def _check_params(node: OperatorNode, report: ValidationReport) -> None:
    params = node.params
    kind = node.kind

    def missing(what: str) -> None:
        report.add(f"node {node.id} ({kind.value}) is missing parameter {what}", node.id)

    if kind == OperatorKind.REGEX_EXTRACT:
        if not isinstance(params.get("pattern"), str) or not params.get("pattern"):
            missing("'pattern'")
    elif kind == OperatorKind.DICTIONARY_EXTRACT:
        if not isinstance(params.get("entries"), list) and not isinstance(params.get("dict_file"), str):
            missing("'entries' or 'dict_file'")
        if "dict" not in params and "dict_file" not in params:
            missing("'dict'")
    elif kind in (OperatorKind.SELECT, OperatorKind.JOIN):
        if "predicate" not in params:
            missing("'predicate'")
        else:
            try:
                predicate_from_json(params["predicate"])
            except AogFormatError as exc:
                report.add(f"node {node.id}: {exc}", node.id)
    elif kind == OperatorKind.PROJECT:
        columns = params.get("columns")
        if not isinstance(columns, list) or not columns or not all(isinstance(c, str) for c in columns):
            missing("'columns'")
    elif kind == OperatorKind.CONSOLIDATE:
        if params.get("policy") != "contained_within":
            report.add(f"node {node.id}: unsupported consolidation policy {params.get('policy')!r}", node.id)
    elif kind == OperatorKind.SUBGRAPH_CALL:
        if not isinstance(params.get("subgraph"), int):
            missing("'subgraph'")


def _check_slots(graph: OperatorGraph, report: ValidationReport) -> None:
    slots: Dict[int, Counter] = defaultdict(Counter)
    for edge in graph.edges:
        if edge.consumer in graph.nodes:
            slots[edge.consumer][edge.slot] += 1

    for node_id in graph.node_ids:
        node = graph.nodes[node_id]
        connected = slots.get(node_id, Counter())
        for slot, count in sorted(connected.items()):
            if count > 1:
                report.add(f"input slot {slot} of node {node_id} connected more than once", node_id)

        arity = INPUT_ARITY[node.kind]
        if arity is None:
            expected = max(connected) + 1 if connected else 1
        else:
            expected = arity
            for slot in sorted(s for s in connected if s >= arity or s < 0):
                report.add(f"node {node_id} has unexpected input slot {slot}", node_id)
        for slot in range(expected):
            if slot not in connected:
                report.add(f"input slot {slot} of node {node_id} unconnected", node_id)


def validate_graph(graph: OperatorGraph) -> ValidationReport:
    """Check every OperatorGraph invariant and collect findings with node ids."""
    report = ValidationReport()

    for edge in graph.edges:
        for end in (edge.producer, edge.consumer):
            if end not in graph.nodes:
                report.add(f"edge {edge.producer}->{edge.consumer} references unknown node {end}", end)
        if edge.port != 0 and graph.nodes.get(edge.producer, None) is not None \
                and graph.nodes[edge.producer].kind != OperatorKind.SUBGRAPH_CALL:
            report.add(f"edge from node {edge.producer} uses port {edge.port} "
                       f"but only SubgraphCall nodes have multiple ports", edge.producer)

    sources = graph.nodes_of_kind(OperatorKind.DOC_SOURCE)
    if len(sources) != 1:
        report.add(f"graph must have exactly one DocSource, found {len(sources)}", *sources)

    nx_graph = graph.to_networkx()
    try:
        cycle = nx.find_cycle(nx_graph)
    except nx.NetworkXNoCycle:
        cycle = None
    if cycle:
        members = [u for u, _ in cycle]
        start = members.index(min(members))
        members = members[start:] + members[:start]
        report.add(f"cycle through nodes {members}", *members)

    _check_slots(graph, report)

    for node_id in graph.node_ids:
        node = graph.nodes[node_id]
        _check_params(node, report)
        if node.kind in EXTRACTION_KINDS:
            for edge in graph.inputs_of(node_id):
                producer = graph.nodes.get(edge.producer)
                if producer is not None and producer.kind != OperatorKind.DOC_SOURCE:
                    report.add(f"extraction node {node_id} must read the document source", node_id)

    if not graph.outputs:
        report.add("graph has no outputs")
    for output in graph.outputs:
        if output.node not in graph.nodes:
            report.add(f"output references unknown node {output.node}", output.node)

    if len(sources) == 1:
        reachable = nx.descendants(nx_graph, sources[0]) | {sources[0]}
        for node_id in graph.node_ids:
            if node_id not in reachable:
                report.add(f"node {node_id} is not reachable from the DocSource", node_id)
        sinks = {o.node for o in graph.outputs if o.node in graph.nodes}
        co_reachable = set(sinks)
        for sink in sinks:
            co_reachable |= nx.ancestors(nx_graph, sink)
        for node_id in graph.node_ids:
            if node_id not in co_reachable:
                report.add(f"node {node_id} does not reach any output", node_id)

    return report
