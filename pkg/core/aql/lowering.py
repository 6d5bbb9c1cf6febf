"""
Lowering - turn a resolved rule program into an operator graph.

Node 0 is the document source; the ``i``-th view (in source order, 1-based)
that some output view depends on becomes node ``i``. Views no output uses are
dropped with a warning. Output views are recorded in the graph's outputs in
statement order. Schemas are inferred while lowering because join predicates
need the joined column names.
"""

from typing import Callable, Dict, List

import networkx as nx
from loguru import logger

from ..aog.schemas import infer_schemas, node_output_schema
from ..exceptions import AqlResolutionError, GraphCycleError, SchemaError
from ..models.annotations import Schema, join_column_names
from ..models.graph import Edge, OperatorGraph, OperatorKind, OperatorNode, OutputRef
from ..operators.dictionary import Dictionary
from .program import (
    ConsolidateBody,
    ExtractDictionary,
    ExtractRegex,
    JoinBody,
    ProjectBody,
    RuleProgram,
    SelectBody,
    UnionAllBody,
    ViewDefinition,
)

DOC_SOURCE_ID = 0

GraphPass = Callable[[OperatorGraph], OperatorGraph]


def optimize(graph: OperatorGraph) -> OperatorGraph:
    """Rule-optimizer slot; plans are currently emitted as written."""
    return graph


def _dependencies(program: RuleProgram) -> nx.DiGraph:
    """View dependency graph keyed by source position (1-based); acyclic or GraphCycleError."""
    index = {view.name: i for i, view in enumerate(program.views, start=1)}
    dependencies = nx.DiGraph()
    dependencies.add_nodes_from(index.values())
    for view in program.views:
        for source in view.body.inputs:
            dependencies.add_edge(index[source], index[view.name])
    if not nx.is_directed_acyclic_graph(dependencies):
        cycle = sorted({u for u, _ in nx.find_cycle(dependencies)})
        names = [program.views[i - 1].name for i in cycle]
        raise GraphCycleError(cycle, f"cycle among views {names} (nodes {cycle})")
    return dependencies


def _live_views(program: RuleProgram, dependencies: nx.DiGraph) -> List[ViewDefinition]:
    """Views some output depends on, in source order."""
    index = {view.name: i for i, view in enumerate(program.views, start=1)}
    live = set()
    for name in program.outputs:
        live.add(index[name])
        live.update(nx.ancestors(dependencies, index[name]))
    for i, view in enumerate(program.views, start=1):
        if i not in live:
            logger.warning(f"{view.position}: view {view.name!r} is not used by any output view; dropped")
    return [view for i, view in enumerate(program.views, start=1) if i in live]


def _view_order(views: List[ViewDefinition], ids: Dict[str, int]) -> List[ViewDefinition]:
    dependencies = nx.DiGraph()
    dependencies.add_nodes_from(ids.values())
    for view in views:
        for source in view.body.inputs:
            dependencies.add_edge(ids[source], ids[view.name])
    return [views[i - 1] for i in nx.lexicographical_topological_sort(dependencies)]


def _qualified(mapping: Dict[str, str]) -> Callable[[str], str]:
    def rename(ref: str) -> str:
        if ref not in mapping:
            raise SchemaError(f"unknown column {ref.split('.', 1)[1]!r} in {ref!r}")
        return mapping[ref]
    return rename


def _dictionary_entries(program: RuleProgram, name: str) -> List[str]:
    statement = program.dictionaries[name]
    if statement.entries is not None:
        dictionary = Dictionary.from_entries(name, statement.entries)
    else:
        path = program.base_dir / statement.file if program.base_dir else statement.file
        dictionary = Dictionary.from_file(name, path)
    return list(dictionary.entries)


def lower_to_aog(program: RuleProgram, passes: List[GraphPass] = None) -> OperatorGraph:
    """One node per used view plus the document source; schemas inferred."""
    views = _live_views(program, _dependencies(program))
    ids = {view.name: index for index, view in enumerate(views, start=1)}
    schemas: Dict[int, Schema] = {}
    nodes: List[OperatorNode] = [OperatorNode(DOC_SOURCE_ID, OperatorKind.DOC_SOURCE)]
    edges: List[Edge] = []
    schemas[DOC_SOURCE_ID] = node_output_schema(nodes[0], [])

    for view in _view_order(views, ids):
        node_id = ids[view.name]
        body = view.body
        input_ids = [ids[name] for name in body.inputs]
        input_schemas = [schemas[i] for i in input_ids]

        if isinstance(body, ExtractRegex):
            kind, params = OperatorKind.REGEX_EXTRACT, {"pattern": body.pattern}
            input_ids = [DOC_SOURCE_ID]
        elif isinstance(body, ExtractDictionary):
            kind = OperatorKind.DICTIONARY_EXTRACT
            params = {"dict": body.dictionary, "entries": _dictionary_entries(program, body.dictionary)}
            input_ids = [DOC_SOURCE_ID]
        elif isinstance(body, SelectBody):
            mapping = {f"{body.alias}.{name}": name for name in input_schemas[0].names}
            kind = OperatorKind.SELECT
            params = {"predicate": body.predicate.rename(_qualified(mapping)).to_json()}
        elif isinstance(body, ProjectBody):
            columns = list(body.columns) if body.columns is not None else input_schemas[0].names
            kind, params = OperatorKind.PROJECT, {"columns": columns}
        elif isinstance(body, JoinBody):
            left, right = input_schemas
            mapping = {f"{body.left_alias}.{name}": name for name in left.names}
            mapping.update({
                f"{body.right_alias}.{name}": renamed
                for name, renamed in zip(right.names, join_column_names(left, right))
            })
            kind = OperatorKind.JOIN
            params = {"predicate": body.predicate.rename(_qualified(mapping)).to_json()}
        elif isinstance(body, UnionAllBody):
            kind, params = OperatorKind.UNION, {}
        elif isinstance(body, ConsolidateBody):
            kind, params = OperatorKind.CONSOLIDATE, {"policy": body.policy}
        else:
            raise AqlResolutionError(f"view {view.name!r} has an unsupported body")

        if isinstance(body, (ExtractRegex, ExtractDictionary)) and body.column != "match":
            params["column"] = body.column

        node = OperatorNode(node_id, kind, params, view=view.name)
        schemas[node_id] = node_output_schema(node, input_schemas)
        nodes.append(node)
        edges.extend(Edge(producer, node_id, slot) for slot, producer in enumerate(input_ids))

    outputs = [OutputRef(ids[name], 0, name) for name in program.outputs]
    graph = OperatorGraph.build(nodes, edges, outputs)
    for graph_pass in [optimize] + list(passes or []):
        graph = graph_pass(graph)
    graph = infer_schemas(graph)
    logger.info(f"Lowered {len(views)} views to a {len(graph.nodes)}-node operator graph")
    return graph
