"""
Streaming pipeline - compile a subgraph into linked stages and run packages.

A Pipeline is a static description (stage specs plus wiring). Every document
gets a fresh set of stage instances and channels, driven by a round-robin
scheduler that advances every stage once per cycle until all streams close.
Documents of a package are spread round-robin over the lanes; a lane's busy
cycles are the setup cost plus the cycles its documents kept the pipeline
busy.
"""

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from loguru import logger

from ..aog.schemas import DOCUMENT_SCHEMA
from ..exceptions import (
    ConfigError,
    OperatorError,
    PipelineBuildError,
    PipelineDeadlockError,
    SchemaError,
    StageError,
)
from ..models.annotations import AnnotationSet, Schema, canonical_key
from ..models.dispatch import EntryError, WorkPackage
from ..models.graph import OperatorKind, OperatorNode
from ..models.plan import Subgraph
from ..models.predicates import predicate_from_json
from ..operators.dictionary import Dictionary
from ..operators.executor import resolve_dictionary, subgraph_order
from ..operators.regex import compile_regex
from ..operators.relational import compile_predicate, join_schema
from ..partitioner.capabilities import PRESETS, CapabilitySet, is_accelerable
from .channels import Channel
from .stages import (
    ConsolidateStage,
    DocumentTap,
    ExtractStage,
    InputStage,
    JoinStage,
    ProjectStage,
    SelectStage,
    SortStage,
    Stage,
    UnionStage,
    dictionary_stage,
    regex_stage,
)

ORDER_SENSITIVE = frozenset({OperatorKind.JOIN, OperatorKind.CONSOLIDATE})


@dataclass(frozen=True)
class AcceleratorConfig:
    lanes: int = 4
    clock_hz: float = 250e6
    setup_cycles: int = 64
    channel_capacity: int = 16
    sorting_buffer_capacity: int = 1024
    regex_state_budget: int = 256

    def __post_init__(self):
        for name in ("lanes", "channel_capacity", "sorting_buffer_capacity", "regex_state_budget"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.clock_hz <= 0:
            raise ConfigError(f"clock_hz must be positive, got {self.clock_hz}")
        if self.setup_cycles < 0:
            raise ConfigError(f"setup_cycles must not be negative, got {self.setup_cycles}")


@dataclass(frozen=True)
class StageSpec:
    name: str
    kind: str
    make: Callable[[], Stage]
    sources: Tuple[str, ...] = ()  # upstream stage names in input-slot order
    node: Optional[int] = None
    schema: Optional[Schema] = None
    ordered_inputs: bool = False


@dataclass
class Pipeline:
    subgraph: Subgraph
    specs: List[StageSpec]
    output_stages: Dict[int, str]  # port -> stage feeding it
    input_stages: Dict[int, str]  # boundary slot -> replay stage
    config: AcceleratorConfig

    @property
    def sorting_buffers(self) -> int:
        return sum(1 for spec in self.specs if spec.kind == "sort")

    @property
    def operator_stages(self) -> List[StageSpec]:
        return [spec for spec in self.specs if spec.node is not None]

    @property
    def extraction_stages(self) -> List[str]:
        return [spec.name for spec in self.specs if spec.kind == "extract"]

    def buffered_stages(self) -> List[str]:
        """Names of the stages whose output passes through a sorting buffer."""
        return [spec.sources[0] for spec in self.specs if spec.kind == "sort"]


def _stage_name(node: OperatorNode) -> str:
    return f"{node.kind.value}#{node.id}"


def _node_stage(
    node: OperatorNode,
    name: str,
    input_schemas: List[Schema],
    dictionaries: Optional[Mapping[str, Dictionary]],
    base_dir: Optional[Path],
) -> Tuple[str, Callable[[], Stage]]:
    kind = node.kind
    params = node.params
    if kind == OperatorKind.REGEX_EXTRACT:
        regex = compile_regex(params["pattern"])
        return "extract", lambda: regex_stage(name, regex)
    if kind == OperatorKind.DICTIONARY_EXTRACT:
        dictionary = resolve_dictionary(node, dictionaries, base_dir)
        return "extract", lambda: dictionary_stage(name, dictionary)
    if kind == OperatorKind.SELECT:
        test = compile_predicate(predicate_from_json(params["predicate"]), input_schemas[0])
        return "select", lambda: SelectStage(name, test)
    if kind == OperatorKind.PROJECT:
        indexes = [input_schemas[0].index_of(c) for c in params["columns"]]
        return "project", lambda: ProjectStage(name, indexes)
    if kind == OperatorKind.UNION:
        return "union", lambda: UnionStage(name)
    if kind == OperatorKind.JOIN:
        predicate = predicate_from_json(params["predicate"])
        left, right = input_schemas
        schema = join_schema(left, right, predicate)
        test = compile_predicate(predicate, schema)
        keys = canonical_key(left), canonical_key(right), canonical_key(schema)
        return "join", lambda: JoinStage(name, test, *keys)
    if kind == OperatorKind.CONSOLIDATE:
        key = canonical_key(input_schemas[0])
        return "consolidate", lambda: ConsolidateStage(name, key)
    raise PipelineBuildError(f"no streaming stage for {kind.value} node {node.id}")


def _ordered_output(kind: str, node: OperatorNode, input_schemas: List[Schema], inputs_ordered: List[bool]) -> bool:
    """Whether a stage's output stream is guaranteed canonical given its inputs."""
    if kind in ("extract", "join", "consolidate", "sort", "input"):
        return True
    if kind == "select":
        return inputs_ordered[0]
    if kind == "project":
        return inputs_ordered[0] and list(node.params["columns"]) == input_schemas[0].names
    if kind == "union":
        return len(inputs_ordered) == 1 and inputs_ordered[0]
    return False


def build_pipeline(
    subgraph: Subgraph,
    config: Optional[AcceleratorConfig] = None,
    caps: Optional[CapabilitySet] = None,
    dictionaries: Optional[Mapping[str, Dictionary]] = None,
    base_dir: Optional[Path] = None,
) -> Pipeline:
    """One stage per subgraph node, sorting buffers where order is not guaranteed."""
    config = config or AcceleratorConfig()
    caps = caps or CapabilitySet("default", PRESETS["default"], config.regex_state_budget)

    for node_id in subgraph.node_ids:
        node = subgraph.nodes[node_id]
        if not is_accelerable(node, caps):
            raise PipelineBuildError(
                f"subgraph {subgraph.id}: {node.label} is not accelerable under capabilities {caps.name!r}"
            )
        if node.output_schema is None:
            raise PipelineBuildError(f"subgraph {subgraph.id}: schema of {node.label} not inferred")

    specs: List[StageSpec] = []
    input_stages: Dict[int, str] = {}
    feeds: Dict[Tuple[int, int], Tuple[str, Schema]] = {}
    for boundary in subgraph.inputs:
        consumers = [c for c in boundary.consumers
                     if not (boundary.document and subgraph.nodes[c[0]].kind in (
                         OperatorKind.REGEX_EXTRACT, OperatorKind.DICTIONARY_EXTRACT))]
        if not consumers:
            continue
        name = f"input[{boundary.slot}]"
        specs.append(StageSpec(name, "input", lambda name=name: InputStage(name), schema=boundary.schema))
        input_stages[boundary.slot] = name
        for consumer in consumers:
            feeds[consumer] = (name, boundary.schema)

    # stream name and guaranteed order of every node's (possibly buffered) output
    streams: Dict[int, Tuple[str, bool]] = {}
    output_nodes = {o.node for o in subgraph.outputs}
    consumers_of: Dict[int, List[OperatorKind]] = {}
    for edge in subgraph.edges:
        consumers_of.setdefault(edge.producer, []).append(subgraph.nodes[edge.consumer].kind)

    for node_id in subgraph_order(subgraph):
        node = subgraph.nodes[node_id]
        internal = {e.slot: e.producer for e in subgraph.inputs_of(node_id)}
        arity = len(internal) + sum(1 for (n, _) in feeds if n == node_id)
        if node.kind in (OperatorKind.REGEX_EXTRACT, OperatorKind.DICTIONARY_EXTRACT):
            arity = 0
        sources: List[str] = []
        schemas: List[Schema] = []
        ordered: List[bool] = []
        for slot in range(arity):
            if slot in internal:
                producer = internal[slot]
                stream, is_ordered = streams[producer]
                sources.append(stream)
                schemas.append(subgraph.nodes[producer].output_schema)
                ordered.append(is_ordered)
            else:
                stream, schema = feeds[(node_id, slot)]
                sources.append(stream)
                schemas.append(schema)
                ordered.append(True)

        name = _stage_name(node)
        try:
            kind, make = _node_stage(node, name, schemas, dictionaries, base_dir)
        except (OperatorError, SchemaError, KeyError) as exc:
            raise PipelineBuildError(f"cannot build stage {name}: {exc}")
        specs.append(StageSpec(
            name, kind, make, tuple(sources), node_id, node.output_schema,
            ordered_inputs=node.kind in ORDER_SENSITIVE,
        ))

        is_ordered = _ordered_output(kind, node, schemas, ordered)
        needs_order = node_id in output_nodes or any(k in ORDER_SENSITIVE for k in consumers_of.get(node_id, []))
        if not is_ordered and needs_order:
            buffer_name = f"sort#{node_id}"
            key = canonical_key(node.output_schema)
            capacity = config.sorting_buffer_capacity
            specs.append(StageSpec(
                buffer_name, "sort",
                lambda buffer_name=buffer_name, key=key, capacity=capacity: SortStage(buffer_name, key, capacity),
                (name,), None, node.output_schema,
            ))
            streams[node_id] = (buffer_name, True)
        else:
            streams[node_id] = (name, is_ordered)

    output_stages = {o.port: streams[o.node][0] for o in subgraph.outputs}
    pipeline = Pipeline(subgraph, specs, output_stages, input_stages, config)
    logger.debug(
        f"Built pipeline for subgraph {subgraph.id}: {len(pipeline.operator_stages)} stages, "
        f"{pipeline.sorting_buffers} sorting buffer(s)"
    )
    return pipeline


@dataclass
class StageTrace:
    stage: str
    cycles: int = 0
    tuples_in: int = 0
    tuples_out: int = 0

    def add(self, cycles: int, tuples_in: int, tuples_out: int) -> None:
        self.cycles += cycles
        self.tuples_in += tuples_in
        self.tuples_out += tuples_out


@dataclass
class DocumentTrace:
    """Per-document instrumentation of one streaming run."""
    cycles: int
    lane: int
    length: int
    char_reads: Dict[str, int] = field(default_factory=dict)
    unordered_streams: List[str] = field(default_factory=list)


@dataclass
class StreamResult:
    results: Dict[int, List[AnnotationSet]] = field(default_factory=dict)  # ticket -> per port
    errors: Dict[int, EntryError] = field(default_factory=dict)
    lane_cycles: List[int] = field(default_factory=list)
    documents: Dict[int, DocumentTrace] = field(default_factory=dict)
    stages: Dict[str, StageTrace] = field(default_factory=dict)
    payload_bytes: int = 0

    @property
    def cycles(self) -> int:
        return sum(self.lane_cycles)

    @property
    def makespan(self) -> int:
        return max(self.lane_cycles, default=0)

    def simulated_throughput(self, clock_hz: float) -> float:
        """Bytes per second if the package took ``makespan`` cycles at ``clock_hz``."""
        if self.makespan == 0:
            return 0.0
        return self.payload_bytes * clock_hz / self.makespan

    def merge_stages(self, stages: Sequence[Stage]) -> None:
        for stage in stages:
            trace = self.stages.setdefault(stage.name, StageTrace(stage.name))
            trace.add(stage.cycles, stage.tuples_in, stage.tuples_out)


def _run_document(
    pipeline: Pipeline,
    text: str,
    inputs: Sequence[Optional[AnnotationSet]],
) -> Tuple[List[AnnotationSet], int, List[Stage], Dict[str, int], List[str]]:
    config = pipeline.config
    stages: Dict[str, Stage] = {spec.name: spec.make() for spec in pipeline.specs}
    by_name = {spec.name: spec for spec in pipeline.specs}
    channels: List[Channel] = []
    for spec in pipeline.specs:
        for slot, source in enumerate(spec.sources):
            producer_spec = by_name[source]
            key = canonical_key(producer_spec.schema)
            channel = Channel(f"{source}->{spec.name}[{slot}]", config.channel_capacity, key,
                              requires_order=spec.ordered_inputs or producer_spec.kind == "sort")
            stages[source].outputs.append(channel)
            stages[spec.name].inputs.append(channel)
            channels.append(channel)

    port_schemas = {o.port: o.schema for o in pipeline.subgraph.outputs}
    collectors: Dict[int, Channel] = {}
    for port, source in sorted(pipeline.output_stages.items()):
        schema = port_schemas[port]
        channel = Channel(f"{source}->port[{port}]", config.channel_capacity, canonical_key(schema), True)
        stages[source].outputs.append(channel)
        collectors[port] = channel
        channels.append(channel)
    collected: Dict[int, List] = {port: [] for port in collectors}

    for slot, name in pipeline.input_stages.items():
        value = inputs[slot] if slot < len(inputs) else None
        if value is None:
            value = AnnotationSet(DOCUMENT_SCHEMA, [(text,)])
        stages[name].load(list(value.tuples))

    extractors = [s for s in stages.values() if isinstance(s, ExtractStage)]
    tap = DocumentTap(text, extractors)
    order = [stages[spec.name] for spec in pipeline.specs]

    busy_cycles = 0
    while True:
        busy, changed = tap.step()
        for stage in order:
            stage_busy, stage_changed = stage.step(text)
            busy = busy or stage_busy
            changed = changed or stage_changed
        for port, channel in collectors.items():
            if not channel.empty:
                collected[port].append(channel.pop())
                changed = True
        if busy:
            busy_cycles += 1
        if tap.finished and all(s.closed for s in order) and all(c.exhausted for c in collectors.values()):
            break
        if not changed:
            raise PipelineDeadlockError(sorted(s.name for s in order if not s.closed))

    results = [
        AnnotationSet(port_schemas[port], collected[port])
        for port in sorted(collectors)
    ]
    reads = {s.name: s.chars_read for s in extractors}
    unordered = [c.name for c in channels if c.requires_order and not c.ordered]
    return results, busy_cycles, order, reads, unordered


def execute_stream(pipeline: Pipeline, package: WorkPackage) -> StreamResult:
    """Run every package entry through the pipeline; per-entry errors are isolated."""
    if not package.entries:
        raise ValueError(f"package {package.id} has no entries")
    config = pipeline.config
    result = StreamResult(lane_cycles=[0] * config.lanes, payload_bytes=package.payload_bytes)
    for index, entry in enumerate(package.entries):
        lane = index % config.lanes
        text = entry.document.text
        try:
            ports, busy, stages, reads, unordered = _run_document(pipeline, text, entry.inputs)
        except StageError as exc:
            logger.warning(f"Package {package.id}: document {entry.document.id} failed in {exc.stage}: {exc.reason}")
            result.errors[entry.ticket] = EntryError(exc.stage, exc.reason)
            result.lane_cycles[lane] += config.setup_cycles
            continue
        cycles = config.setup_cycles + busy
        result.lane_cycles[lane] += cycles
        result.results[entry.ticket] = ports
        result.documents[entry.ticket] = DocumentTrace(cycles, lane, len(text), reads, unordered)
        result.merge_stages(stages)
    logger.debug(
        f"Package {package.id} on subgraph {pipeline.subgraph.id}: {len(package)} docs, "
        f"{result.cycles} cycles, makespan {result.makespan}"
    )
    return result


TRACE_HEADER = ["stage", "cycles", "tuples_in", "tuples_out"]


def trace_csv(traces: Sequence[StageTrace]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for trace in traces:
        writer.writerow([trace.stage, trace.cycles, trace.tuples_in, trace.tuples_out])
    return buffer.getvalue()
