"""
Corpus runner - document-per-thread execution of a partition plan.

Every worker thread takes one document at a time and evaluates the
supergraph. SubgraphCall nodes go through the dispatcher: the worker submits
its document and sleeps until the package holding it completes. Per-document
failures are collected and the run carries on.
"""

import queue
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

from loguru import logger

from ..accel.pipeline import AcceleratorConfig, StageTrace, build_pipeline
from ..exceptions import InvariantViolation, SpanForgeError
from ..models.annotations import AnnotationSet, Document
from ..models.dispatch import DispatchConfig, DispatchStats
from ..models.graph import OperatorNode
from ..models.plan import PartitionPlan
from ..models.profile import ProfileReport
from ..operators.dictionary import Dictionary
from ..operators.executor import GraphExecutor
from ..partitioner.capabilities import CapabilitySet
from ..partitioner.rewrite import validate_plan
from ..profiling.profiler import build_profile
from .corpus import CorpusItem
from .dispatch import Dispatcher, TicketFailed

DocumentViews = Dict[str, AnnotationSet]


@dataclass
class RunResult:
    annotations: Dict[str, DocumentViews] = field(default_factory=dict)
    failures: Dict[str, str] = field(default_factory=dict)
    profile: Optional[ProfileReport] = None
    stats: DispatchStats = field(default_factory=DispatchStats)
    stage_traces: List[StageTrace] = field(default_factory=list)

    @property
    def documents(self) -> int:
        return len(self.annotations) + len(self.failures)


@dataclass
class _WorkerState:
    timings: Dict[int, float] = field(default_factory=dict)
    annotations: Dict[str, DocumentViews] = field(default_factory=dict)
    failures: Dict[str, str] = field(default_factory=dict)
    bytes: int = 0
    fatal: List[InvariantViolation] = field(default_factory=list)


def run_corpus(
    plan: PartitionPlan,
    corpus: Sequence[CorpusItem],
    config: Optional[DispatchConfig] = None,
    accel: Optional[AcceleratorConfig] = None,
    caps: Optional[CapabilitySet] = None,
    dictionaries: Optional[Mapping[str, Dictionary]] = None,
    base_dir: Optional[Path] = None,
    profile: bool = True,
) -> RunResult:
    """Annotate every corpus document under the plan; returns annotations, failures and profile."""
    config = config or DispatchConfig()
    validate_plan(plan).raise_if_failed()
    pipelines = {
        sg.id: build_pipeline(sg, accel, caps, dictionaries, base_dir)
        for sg in plan.subgraphs
    }
    executor = GraphExecutor(plan.supergraph, dictionaries, base_dir)
    dispatcher = Dispatcher(pipelines, config).start() if pipelines else None

    def call_handler(node: OperatorNode, doc: Document, inputs: List[AnnotationSet]) -> List[AnnotationSet]:
        return dispatcher.call(node.params["subgraph"], doc, inputs)

    work: "queue.Queue[Optional[CorpusItem]]" = queue.Queue()
    for item in corpus:
        work.put(item)
    for _ in range(config.worker_threads):
        work.put(None)

    def worker(state: _WorkerState) -> None:
        while True:
            item = work.get()
            if item is None:
                if dispatcher is not None:
                    dispatcher.drain()
                return
            if not item.ok:
                state.failures[item.doc_id] = item.error or "unreadable"
                continue
            doc = item.document
            state.bytes += doc.payload_bytes
            try:
                views = executor.run(doc, state.timings if profile else None, call_handler)
            except TicketFailed as exc:
                logger.warning(f"Document {doc.id} failed on the accelerator: {exc}")
                state.failures[doc.id] = str(exc)
            except InvariantViolation as exc:
                state.fatal.append(exc)
                state.failures[doc.id] = str(exc)
            except SpanForgeError as exc:
                logger.warning(f"Document {doc.id} failed: {exc}")
                state.failures[doc.id] = str(exc)
            else:
                state.annotations[doc.id] = views

    logger.info(
        f"Running {len(corpus)} documents on {config.worker_threads} worker thread(s), "
        f"{len(pipelines)} accelerated subgraph(s)"
    )
    states = [_WorkerState() for _ in range(config.worker_threads)]
    threads = [
        threading.Thread(target=worker, args=(state,), name=f"worker-{index}", daemon=True)
        for index, state in enumerate(states)
    ]
    started = time.perf_counter()
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()
    elapsed = time.perf_counter() - started

    result = RunResult()
    if dispatcher is not None:
        dispatcher.drain()
        dispatcher.stop()
        result.stats = dispatcher.stats
        result.stage_traces = dispatcher.stage_traces
    for state in states:
        if state.fatal:
            raise state.fatal[0]
        result.annotations.update(state.annotations)
        result.failures.update(state.failures)

    result.profile = build_profile(
        plan.supergraph,
        [state.timings for state in states],
        total_s=elapsed,
        bytes=sum(state.bytes for state in states),
        threads=config.worker_threads,
        docs=sum(len(state.annotations) for state in states),
    )
    logger.info(
        f"Run finished: {len(result.annotations)} annotated, {len(result.failures)} failed, "
        f"{result.profile.throughput / 1e6:.2f} MB/s, {result.stats.packages} package(s)"
    )
    return result
