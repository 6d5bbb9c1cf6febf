"""
Software graph execution - the reference evaluator.

``GraphExecutor`` evaluates an operator graph over one document in
topological order, materializing every node's annotation set. SubgraphCall
nodes are delegated to a caller-supplied handler, which is how the runtime
hands accelerated subgraphs to the dispatch layer.
"""

import time
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence

import networkx as nx

from ..aog.ordering import topo_order
from ..aog.schemas import DOCUMENT_SCHEMA, DEFAULT_MATCH_COLUMN
from ..exceptions import OperatorError
from ..models.annotations import AnnotationSet, Document
from ..models.graph import OperatorGraph, OperatorKind, OperatorNode, OutputRef
from ..models.plan import Subgraph
from ..models.predicates import predicate_from_json
from .dictionary import Dictionary, find_entries
from .regex import find_matches
from .relational import consolidate, project, select, span_join, union_all

NodeFunction = Callable[[Document, List[AnnotationSet]], AnnotationSet]
CallHandler = Callable[[OperatorNode, Document, List[AnnotationSet]], List[AnnotationSet]]


def document_set(doc: Document) -> AnnotationSet:
    return AnnotationSet(DOCUMENT_SCHEMA, [(doc.text,)])


def spans_to_set(spans, column: str) -> AnnotationSet:
    return AnnotationSet.of_spans(spans, column)


def regex_extract(doc: Document, pattern: str, column: str = DEFAULT_MATCH_COLUMN) -> AnnotationSet:
    return spans_to_set(find_matches(pattern, doc.text), column)


def dictionary_extract(doc: Document, dictionary: Dictionary, column: str = DEFAULT_MATCH_COLUMN) -> AnnotationSet:
    return spans_to_set(find_entries(dictionary, doc.text), column)


def resolve_dictionary(
    node: OperatorNode,
    dictionaries: Optional[Mapping[str, Dictionary]] = None,
    base_dir: Optional[Path] = None,
) -> Dictionary:
    """Dictionary for a DictionaryExtract node: explicit mapping, inline entries, then file."""
    params = node.params
    name = params.get("dict", f"dict_{node.id}")
    if dictionaries and name in dictionaries:
        return dictionaries[name]
    if "entries" in params:
        return Dictionary.from_entries(name, params["entries"])
    path = Path(params["dict_file"])
    if not path.is_absolute() and base_dir is not None:
        path = base_dir / path
    return Dictionary.from_file(name, path)


def node_function(
    node: OperatorNode,
    dictionaries: Optional[Mapping[str, Dictionary]] = None,
    base_dir: Optional[Path] = None,
) -> NodeFunction:
    """Reference implementation of one non-source, non-call node."""
    kind = node.kind
    params = node.params
    column = params.get("column", DEFAULT_MATCH_COLUMN)

    if kind == OperatorKind.REGEX_EXTRACT:
        pattern = params["pattern"]
        return lambda doc, inputs: regex_extract(doc, pattern, column)

    if kind == OperatorKind.DICTIONARY_EXTRACT:
        dictionary = resolve_dictionary(node, dictionaries, base_dir)
        return lambda doc, inputs: dictionary_extract(doc, dictionary, column)

    if kind == OperatorKind.SELECT:
        predicate = predicate_from_json(params["predicate"])
        return lambda doc, inputs: select(inputs[0], predicate, doc.text)

    if kind == OperatorKind.PROJECT:
        columns = list(params["columns"])
        return lambda doc, inputs: project(inputs[0], columns)

    if kind == OperatorKind.JOIN:
        predicate = predicate_from_json(params["predicate"])
        return lambda doc, inputs: span_join(inputs[0], inputs[1], predicate, doc.text)

    if kind == OperatorKind.UNION:
        return lambda doc, inputs: union_all(inputs)

    if kind == OperatorKind.CONSOLIDATE:
        policy = params.get("policy", "contained_within")
        return lambda doc, inputs: consolidate(inputs[0], policy)

    if kind == OperatorKind.SINK:
        return lambda doc, inputs: inputs[0]

    raise OperatorError(f"no software implementation for {kind.value} node {node.id}")


def output_name(graph: OperatorGraph, ref: OutputRef) -> str:
    if ref.view:
        return ref.view
    node = graph.nodes.get(ref.node)
    if node is not None and node.view and ref.port == 0:
        return node.view
    return f"node_{ref.node}" + (f"_{ref.port}" if ref.port else "")


class GraphExecutor:
    """Compiled evaluator for one graph; reusable across documents and threads."""

    def __init__(
        self,
        graph: OperatorGraph,
        dictionaries: Optional[Mapping[str, Dictionary]] = None,
        base_dir: Optional[Path] = None,
    ):
        self.graph = graph
        self.order = topo_order(graph)
        self.inputs = {node_id: graph.inputs_of(node_id) for node_id in self.order}
        self.functions: Dict[int, NodeFunction] = {
            node_id: node_function(graph.nodes[node_id], dictionaries, base_dir)
            for node_id in self.order
            if graph.nodes[node_id].kind not in (OperatorKind.DOC_SOURCE, OperatorKind.SUBGRAPH_CALL)
        }

    def evaluate(
        self,
        doc: Document,
        timings: Optional[Dict[int, float]] = None,
        call_handler: Optional[CallHandler] = None,
    ) -> Dict[int, List[AnnotationSet]]:
        """Every node's results, one annotation set per output port."""
        results: Dict[int, List[AnnotationSet]] = {}
        for node_id in self.order:
            node = self.graph.nodes[node_id]
            inputs = [results[e.producer][e.port] for e in self.inputs[node_id]]
            started = time.perf_counter()
            if node.kind == OperatorKind.DOC_SOURCE:
                results[node_id] = [document_set(doc)]
            elif node.kind == OperatorKind.SUBGRAPH_CALL:
                if call_handler is None:
                    raise OperatorError(f"SubgraphCall node {node_id} needs a call handler")
                results[node_id] = call_handler(node, doc, inputs)
            else:
                results[node_id] = [self.functions[node_id](doc, inputs)]
            if timings is not None:
                timings[node_id] = timings.get(node_id, 0.0) + time.perf_counter() - started
        return results

    def run(
        self,
        doc: Document,
        timings: Optional[Dict[int, float]] = None,
        call_handler: Optional[CallHandler] = None,
    ) -> Dict[str, AnnotationSet]:
        """Output views of the graph, keyed by view name."""
        results = self.evaluate(doc, timings, call_handler)
        return {output_name(self.graph, ref): results[ref.node][ref.port] for ref in self.graph.outputs}


def subgraph_order(subgraph: Subgraph) -> List[int]:
    nx_graph = nx.DiGraph()
    nx_graph.add_nodes_from(subgraph.node_ids)
    nx_graph.add_edges_from((e.producer, e.consumer) for e in subgraph.edges)
    return list(nx.lexicographical_topological_sort(nx_graph))


def execute_subgraph_software(
    subgraph: Subgraph,
    doc: Document,
    inputs: Sequence[Optional[AnnotationSet]],
    dictionaries: Optional[Mapping[str, Dictionary]] = None,
    base_dir: Optional[Path] = None,
) -> List[AnnotationSet]:
    """Reference results of an accelerated subgraph, one set per output port.

    ``inputs`` follows the SubgraphCall slot order; the document slot may be None.
    """
    feeds: Dict[tuple, AnnotationSet] = {}
    for boundary in subgraph.inputs:
        value = document_set(doc) if boundary.document else inputs[boundary.slot]
        for consumer in boundary.consumers:
            feeds[consumer] = value

    results: Dict[int, AnnotationSet] = {}
    for node_id in subgraph_order(subgraph):
        node = subgraph.nodes[node_id]
        internal = {e.slot: e.producer for e in subgraph.inputs_of(node_id)}
        arity = len(internal) + sum(1 for (n, _) in feeds if n == node_id)
        node_inputs = [
            results[internal[slot]] if slot in internal else feeds[(node_id, slot)]
            for slot in range(arity)
        ]
        results[node_id] = node_function(node, dictionaries, base_dir)(doc, node_inputs)
    return [results[output.node] for output in sorted(subgraph.outputs, key=lambda o: o.port)]


def execute_graph_software(
    graph: OperatorGraph,
    doc: Document,
    dictionaries: Optional[Mapping[str, Dictionary]] = None,
) -> Dict[int, AnnotationSet]:
    """Evaluate the graph on one document; result keyed by output node id."""
    results = GraphExecutor(graph, dictionaries).evaluate(doc)
    return {ref.node: results[ref.node][ref.port] for ref in graph.outputs}
