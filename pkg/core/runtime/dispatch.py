"""
Dispatch - batching subgraph invocations into work packages.

Worker threads submit (document, inputs) for a subgraph and sleep on a
ticket. A single communication thread owns the per-subgraph packing queues:
it cuts work packages, hands them to the accelerator executor and, when a
completion signal comes back, wakes exactly the workers of that package.

Everything the communication thread reacts to (submissions, completions,
drain and stop requests) arrives through one inbox queue, so it sleeps until
either a message or the next flush deadline.
"""

import itertools
import queue
import threading
import time
from collections import deque
from dataclasses import dataclass
from typing import Callable, Deque, Dict, List, Optional, Sequence, Tuple

from loguru import logger

from ..accel.pipeline import Pipeline, StageTrace, execute_stream
from ..exceptions import DispatchInvariantError, SpanForgeError
from ..models.annotations import AnnotationSet, Document
from ..models.dispatch import (
    CompletionSignal,
    DispatchConfig,
    DispatchStats,
    EntryError,
    PackageEntry,
    PackageReason,
    WorkPackage,
)


def pack(
    pending: Deque[PackageEntry],
    config: DispatchConfig,
    now: float,
    draining: bool = False,
) -> Optional[Tuple[List[PackageEntry], PackageReason]]:
    """Cut the next package off the front of ``pending`` or return None to wait.

    Entries stay in submission order. A package closes as soon as its payload
    exceeds the byte threshold or it holds ``max_docs_per_package`` entries;
    otherwise the head is flushed once the oldest entry has waited
    ``flush_timeout_s``, or unconditionally while draining.
    """
    if not pending:
        return None
    size = 0
    for count, entry in enumerate(pending, start=1):
        size += entry.document.payload_bytes
        if size > config.byte_threshold:
            return [pending.popleft() for _ in range(count)], PackageReason.BYTES
        if count == config.max_docs_per_package:
            return [pending.popleft() for _ in range(count)], PackageReason.MAX_DOCS

    take = min(len(pending), config.max_docs_per_package)
    if draining:
        return [pending.popleft() for _ in range(take)], PackageReason.DRAIN
    if now - pending[0].submitted_at >= config.flush_timeout_s:
        return [pending.popleft() for _ in range(take)], PackageReason.TIMEOUT
    return None


class TicketFailed(SpanForgeError):
    """The accelerator reported an error for this worker's document."""

    def __init__(self, error: EntryError):
        super().__init__(str(error))
        self.error = error


class Ticket:
    """Completion slot for one submission: one writer, one sleeping waiter."""

    def __init__(self, number: int):
        self.number = number
        self._event = threading.Event()
        self._lock = threading.Lock()
        self._results: Optional[List[AnnotationSet]] = None
        self._error: Optional[EntryError] = None
        self.released = False

    def release(self, results: Optional[List[AnnotationSet]] = None, error: Optional[EntryError] = None) -> None:
        with self._lock:
            if self.released:
                raise DispatchInvariantError(f"ticket {self.number} released twice")
            self.released = True
            self._results = results
            self._error = error
        self._event.set()

    def wait(self, timeout: Optional[float] = None) -> List[AnnotationSet]:
        if not self._event.wait(timeout):
            raise DispatchInvariantError(f"ticket {self.number} not released within {timeout}s")
        if self._error is not None:
            raise TicketFailed(self._error)
        return list(self._results or [])


class AcceleratorExecutor(threading.Thread):
    """Runs work packages on the subgraph pipelines, one package at a time."""

    def __init__(self, pipelines: Dict[int, Pipeline], completions: Callable[[CompletionSignal], None]):
        super().__init__(name="accelerator", daemon=True)
        self.pipelines = pipelines
        self.completions = completions
        self.work: "queue.Queue[Optional[WorkPackage]]" = queue.Queue()
        self.traces: Dict[str, StageTrace] = {}

    def execute(self, package: WorkPackage) -> CompletionSignal:
        pipeline = self.pipelines.get(package.subgraph)
        if pipeline is None:
            return CompletionSignal(package.id, fatal=f"no pipeline for subgraph {package.subgraph}")
        try:
            result = execute_stream(pipeline, package)
        except SpanForgeError as exc:
            logger.error(f"Package {package.id} aborted: {exc}")
            return CompletionSignal(package.id, fatal=str(exc))
        for name, trace in result.stages.items():
            self.traces.setdefault(name, StageTrace(name)).add(trace.cycles, trace.tuples_in, trace.tuples_out)
        return CompletionSignal(
            package.id, dict(result.results), dict(result.errors), result.cycles, result.makespan
        )

    def run(self) -> None:
        while True:
            package = self.work.get()
            if package is None:
                return
            try:
                signal = self.execute(package)
            except Exception as exc:
                # the package's workers are asleep on it; they must still be woken
                logger.exception(f"Package {package.id} crashed the accelerator executor")
                signal = CompletionSignal(package.id, fatal=f"{type(exc).__name__}: {exc}")
            self.completions(signal)


_SUBMIT, _COMPLETE, _DRAIN, _STOP = "submit", "complete", "drain", "stop"


@dataclass
class _Submission:
    subgraph: int
    entry: PackageEntry


class Dispatcher:
    """Communication thread plus accelerator executor for one run."""

    def __init__(self, pipelines: Dict[int, Pipeline], config: DispatchConfig):
        self.config = config
        self.stats = DispatchStats()
        self.fatal: Optional[str] = None
        self._inbox: "queue.Queue[Tuple[str, object]]" = queue.Queue()
        self._pending: Dict[int, Deque[PackageEntry]] = {sg: deque() for sg in pipelines}
        self._tickets: Dict[int, Ticket] = {}
        self._tickets_lock = threading.Lock()
        self._in_flight: Dict[int, WorkPackage] = {}
        self._completed: set = set()
        self._ticket_numbers = itertools.count()
        self._package_ids = itertools.count()
        self._draining = False
        self._stopping = False
        self._executor = AcceleratorExecutor(pipelines, lambda signal: self._inbox.put((_COMPLETE, signal)))
        self._thread = threading.Thread(target=self._loop, name="communication", daemon=True)

    # worker side

    def submit(self, subgraph: int, document: Document, inputs: Sequence[Optional[AnnotationSet]] = ()) -> Ticket:
        if subgraph not in self._pending:
            raise DispatchInvariantError(f"submission for unknown subgraph {subgraph}")
        with self._tickets_lock:
            ticket = Ticket(next(self._ticket_numbers))
            self._tickets[ticket.number] = ticket
        entry = PackageEntry(ticket.number, document, time.monotonic(), tuple(inputs))
        self._inbox.put((_SUBMIT, _Submission(subgraph, entry)))
        return ticket

    def call(self, subgraph: int, document: Document, inputs: Sequence[Optional[AnnotationSet]] = ()) -> List[AnnotationSet]:
        """Submit and sleep until the package holding this document completes."""
        return self.submit(subgraph, document, inputs).wait()

    # lifecycle

    def start(self) -> "Dispatcher":
        self._executor.start()
        self._thread.start()
        return self

    def drain(self) -> None:
        """Corpus exhausted: flush pending entries without waiting for thresholds."""
        self._inbox.put((_DRAIN, None))

    def stop(self) -> None:
        self._inbox.put((_STOP, None))
        self._thread.join()
        self._executor.work.put(None)
        self._executor.join()
        if self.fatal:
            raise DispatchInvariantError(self.fatal)

    @property
    def stage_traces(self) -> List[StageTrace]:
        """Per-stage totals over every package; complete once the dispatcher is stopped."""
        return sorted(self._executor.traces.values(), key=lambda trace: trace.stage)

    # communication thread

    def _next_deadline(self) -> Optional[float]:
        heads = [q[0].submitted_at for q in self._pending.values() if q]
        if not heads:
            return None
        return min(heads) + self.config.flush_timeout_s

    def _dispatch_ready(self) -> None:
        now = time.monotonic()
        for subgraph, pending in self._pending.items():
            while True:
                cut = pack(pending, self.config, now, self._draining)
                if cut is None:
                    break
                entries, reason = cut
                package = WorkPackage(next(self._package_ids), subgraph, entries, reason)
                self._in_flight[package.id] = package
                self.stats.record(package)
                logger.debug(
                    f"Package {package.id} -> subgraph {subgraph}: {len(package)} docs, "
                    f"{package.payload_bytes} B ({reason.value})"
                )
                self._executor.work.put(package)

    def complete(self, signal: CompletionSignal) -> None:
        """Wake every worker of the signalled package with its own results."""
        package = self._in_flight.pop(signal.package_id, None)
        if package is None:
            what = "duplicate" if signal.package_id in self._completed else "unknown"
            raise DispatchInvariantError(f"{what} completion signal for package {signal.package_id}")
        self._completed.add(signal.package_id)
        self.stats.cycles += signal.cycles
        self.stats.makespan_cycles += signal.makespan
        if signal.fatal:
            self.fatal = self.fatal or signal.fatal
        for entry in package.entries:
            with self._tickets_lock:
                ticket = self._tickets.pop(entry.ticket)
            if signal.fatal:
                ticket.release(error=EntryError("accelerator", signal.fatal))
            elif entry.ticket in signal.errors:
                ticket.release(error=signal.errors[entry.ticket])
            elif entry.ticket in signal.results:
                ticket.release(results=signal.results[entry.ticket])
            else:
                ticket.release(error=EntryError("accelerator", "no result for document"))
            self.stats.wakeups += 1

    def _idle(self) -> bool:
        return not self._in_flight and not any(self._pending.values())

    def _loop(self) -> None:
        while True:
            deadline = self._next_deadline()
            timeout = None if deadline is None else max(0.0, deadline - time.monotonic())
            try:
                kind, payload = self._inbox.get(timeout=timeout)
            except queue.Empty:
                kind, payload = None, None
            try:
                if kind == _SUBMIT:
                    self._pending[payload.subgraph].append(payload.entry)
                elif kind == _COMPLETE:
                    self.complete(payload)
                elif kind == _DRAIN:
                    self._draining = True
                elif kind == _STOP:
                    self._draining = True
                    self._stopping = True
                self._dispatch_ready()
            except DispatchInvariantError as exc:
                logger.error(f"Dispatch invariant violated: {exc}")
                self.fatal = self.fatal or str(exc)
            if self._stopping and self._idle():
                return
