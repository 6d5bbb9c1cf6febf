"""
Graph rewriting - cut accelerated subgraphs out of an operator graph.

Each node set becomes one Subgraph plus one SubgraphCall node in the
supergraph. Call node ids follow the largest original id; subgraph ids are
the position of the set in the input list.

Boundary layout of a call node:
  - input slot 0 is the document stream when any subgraph node reads the
    DocSource; the remaining slots follow distinct supergraph producers in
    ascending (producer, port) order
  - output ports follow ascending node id over the subgraph nodes whose
    results leave the set (consumed outside or reported as a graph output)
"""

from collections import defaultdict
from typing import Dict, List, Sequence, Set, Tuple

from loguru import logger

from ..aog.schemas import infer_schemas, producer_schema
from ..aog.validation import ValidationReport, validate_graph
from ..exceptions import PartitionError, SchemaError
from ..models.graph import Edge, OperatorGraph, OperatorKind, OperatorNode, OutputRef
from ..models.plan import HOST, BoundaryInput, BoundaryOutput, PartitionPlan, Subgraph, accelerator_location
from ..operators.executor import output_name
from .capabilities import NEVER_ACCELERABLE
from .convex import ReachabilityIndex

Ref = Tuple[int, int]  # (node, port)


def _check_sets(graph: OperatorGraph, sets: Sequence[Set[int]]) -> None:
    index = ReachabilityIndex(graph.to_networkx())
    seen: Dict[int, int] = {}
    for position, members in enumerate(sets):
        if not members:
            raise PartitionError(f"subgraph set {position} is empty")
        for node_id in sorted(members):
            if node_id not in graph.nodes:
                raise PartitionError(f"subgraph set {position} references unknown node {node_id}")
            if graph.nodes[node_id].kind in NEVER_ACCELERABLE:
                raise PartitionError(
                    f"node {node_id} ({graph.nodes[node_id].kind.value}) cannot be offloaded"
                )
            if node_id in seen:
                raise PartitionError(f"node {node_id} appears in subgraph sets {seen[node_id]} and {position}")
            seen[node_id] = position
        if not index.is_convex(members):
            raise PartitionError(f"subgraph set {position} {sorted(members)} is not convex")


def rewrite(graph: OperatorGraph, sets: Sequence[Set[int]], scenario: int = None) -> PartitionPlan:
    """Replace every node set with a SubgraphCall; returns the partition plan."""
    if not sets:
        return PartitionPlan(graph, (), {node_id: HOST for node_id in graph.node_ids}, scenario)
    if any(node.output_schema is None for node in graph.nodes.values()):
        graph = infer_schemas(graph)
    _check_sets(graph, sets)

    owner: Dict[int, int] = {node: i for i, members in enumerate(sets) for node in members}
    first_call = max(graph.node_ids) + 1
    call_ids = [first_call + i for i in range(len(sets))]
    external_ids = {o.node for o in graph.outputs}

    # output ports
    ports: Dict[int, int] = {}
    boundary_outputs: List[List[BoundaryOutput]] = []
    for i, members in enumerate(sets):
        leaving = sorted(
            n for n in members
            if n in external_ids or any(e.consumer not in members for e in graph.consumers_of(n))
        )
        outputs = []
        for port, node_id in enumerate(leaving):
            ports[node_id] = port
            outputs.append(BoundaryOutput(port, node_id, graph.nodes[node_id].output_schema))
        boundary_outputs.append(outputs)

    def super_ref(producer: int, port: int) -> Ref:
        if producer in owner:
            return call_ids[owner[producer]], ports[producer]
        return producer, port

    subgraphs: List[Subgraph] = []
    call_inputs: Dict[int, List[Tuple[Ref, int]]] = {}
    for i, members in enumerate(sets):
        crossing: Dict[Ref, List[Tuple[int, int]]] = defaultdict(list)
        internal: List[Edge] = []
        for edge in graph.edges:
            if edge.consumer not in members:
                continue
            if edge.producer in members:
                internal.append(edge)
            else:
                crossing[super_ref(edge.producer, edge.port)].append((edge.consumer, edge.slot))

        doc_refs = [ref for ref in crossing if graph.nodes.get(ref[0]) is not None
                    and graph.nodes[ref[0]].kind == OperatorKind.DOC_SOURCE]
        ordered = doc_refs + sorted(ref for ref in crossing if ref not in doc_refs)
        inputs = []
        for slot, ref in enumerate(ordered):
            try:
                if ref[0] in graph.nodes:
                    schema = producer_schema(graph, ref[0], ref[1])
                else:
                    owner_set = call_ids.index(ref[0])
                    schema = boundary_outputs[owner_set][ref[1]].schema
            except SchemaError as exc:
                raise PartitionError(f"boundary schema of subgraph {i} underivable: {exc}")
            inputs.append(BoundaryInput(
                slot=slot,
                producer=ref[0],
                producer_port=ref[1],
                schema=schema,
                consumers=tuple(sorted(crossing[ref])),
                document=ref in doc_refs,
            ))
        call_inputs[call_ids[i]] = [(ref, slot) for slot, ref in enumerate(ordered)]
        subgraphs.append(Subgraph(
            id=i,
            call_node=call_ids[i],
            nodes={n: graph.nodes[n] for n in sorted(members)},
            edges=tuple(sorted(internal)),
            inputs=tuple(inputs),
            outputs=tuple(boundary_outputs[i]),
        ))

    nodes: List[OperatorNode] = [graph.nodes[n] for n in graph.node_ids if n not in owner]
    for i, call_id in enumerate(call_ids):
        nodes.append(OperatorNode(
            call_id,
            OperatorKind.SUBGRAPH_CALL,
            {"subgraph": i, "output_schemas": [o.schema.to_list() for o in boundary_outputs[i]]},
        ))

    edges: Set[Edge] = set()
    for edge in graph.edges:
        if edge.consumer not in owner:
            producer, port = super_ref(edge.producer, edge.port)
            edges.add(Edge(producer, edge.consumer, edge.slot, port))
    for call_id, refs in call_inputs.items():
        edges.update(Edge(ref[0], call_id, slot, ref[1]) for ref, slot in refs)

    outputs = []
    for ref in graph.outputs:
        name = output_name(graph, ref)
        node, port = super_ref(ref.node, ref.port)
        outputs.append(OutputRef(node, port, name))

    supergraph = OperatorGraph.build(nodes, edges, outputs)
    report = validate_graph(supergraph)
    if not report.ok:
        raise PartitionError(f"rewritten supergraph is invalid: {'; '.join(report.messages)}")
    supergraph = infer_schemas(supergraph)

    location = {node_id: HOST for node_id in supergraph.node_ids}
    location.update({node: accelerator_location(owner[node]) for node in owner})
    logger.info(
        f"Rewrote {len(graph.nodes)}-node graph into {len(supergraph.nodes)}-node supergraph "
        f"with {len(subgraphs)} accelerated subgraph(s)"
    )
    return PartitionPlan(supergraph, tuple(subgraphs), location, scenario)


def validate_plan(plan: PartitionPlan, original: OperatorGraph = None) -> ValidationReport:
    """Structural checks of a partition plan, optionally against the graph it came from."""
    report = validate_graph(plan.supergraph)
    supergraph = plan.supergraph
    calls = supergraph.nodes_of_kind(OperatorKind.SUBGRAPH_CALL)
    subgraph_ids = [sg.id for sg in plan.subgraphs]

    referenced = [supergraph.nodes[c].params.get("subgraph") for c in calls]
    for call_id, subgraph_id in zip(calls, referenced):
        if subgraph_id not in subgraph_ids:
            report.add(f"SubgraphCall node {call_id} references unknown subgraph {subgraph_id}", call_id)
    for sg in plan.subgraphs:
        if referenced.count(sg.id) != 1:
            report.add(f"subgraph {sg.id} is referenced by {referenced.count(sg.id)} call nodes")
            continue
        if sg.call_node not in supergraph.nodes or supergraph.nodes[sg.call_node].params.get("subgraph") != sg.id:
            report.add(f"subgraph {sg.id} names call node {sg.call_node} which does not call it")
            continue
        slots = sorted(e.slot for e in supergraph.inputs_of(sg.call_node))
        if slots != [i.slot for i in sg.inputs]:
            report.add(f"subgraph {sg.id} declares inputs {[i.slot for i in sg.inputs]} "
                       f"but call node {sg.call_node} has slots {slots}", sg.call_node)
        for output in sg.outputs:
            node = sg.nodes.get(output.node)
            if node is None:
                report.add(f"subgraph {sg.id} output port {output.port} names unknown node {output.node}")
            elif node.output_schema is not None and node.output_schema != output.schema:
                report.add(f"subgraph {sg.id} output port {output.port} schema differs from node {output.node}")

    offloaded: Dict[int, int] = {}
    for sg in plan.subgraphs:
        for node_id in sg.nodes:
            if node_id in offloaded or node_id in supergraph.nodes:
                report.add(f"node {node_id} placed more than once", node_id)
            offloaded[node_id] = sg.id
    for node_id in list(supergraph.node_ids) + sorted(offloaded):
        expected = accelerator_location(offloaded[node_id]) if node_id in offloaded else HOST
        actual = plan.location.get(node_id)
        if actual is None:
            report.add(f"location map does not cover node {node_id}", node_id)
        elif actual != expected:
            report.add(f"node {node_id} located at {actual}, expected {expected}", node_id)

    if original is not None:
        kept = {n for n in supergraph.node_ids if supergraph.nodes[n].kind != OperatorKind.SUBGRAPH_CALL}
        if kept | set(offloaded) != set(original.node_ids) or kept & set(offloaded):
            report.add("supergraph and subgraph nodes do not partition the original node set")
        index = ReachabilityIndex(original.to_networkx())
        for sg in plan.subgraphs:
            if set(sg.nodes) <= set(original.nodes) and not index.is_convex(sg.nodes):
                report.add(f"subgraph {sg.id} is not convex in the original graph", *sg.node_ids)
    return report
