"""
Pipeline stages.

Each stage moves at most one tuple out and consumes at most one tuple per
cycle. Output goes to every consumer channel at once, so a single full
consumer stalls the stage. Extraction stages are fed by the document tap
rather than by channels.
"""

from abc import ABC, abstractmethod
from collections import deque
from typing import Any, Callable, Deque, List, Optional, Tuple

from ..exceptions import StageError
from ..models.annotations import AnnotationTuple, Span
from ..operators.dictionary import StreamingDictionaryScanner
from ..operators.regex import StreamingRegexScanner
from ..operators.relational import RowTest
from .channels import Channel
from .sorting_buffer import SortingBuffer

Key = Callable[[AnnotationTuple], Any]


class Stage(ABC):
    """One operator module of the streaming design."""

    def __init__(self, name: str):
        self.name = name
        self.inputs: List[Channel] = []
        self.outputs: List[Channel] = []
        self.pending: Deque[AnnotationTuple] = deque()
        self.cycles = 0
        self.tuples_in = 0
        self.tuples_out = 0
        self.closed = False
        self._finished = False

    def _flush(self) -> bool:
        if not self.pending or not all(out.has_space for out in self.outputs):
            return False
        item = self.pending.popleft()
        for out in self.outputs:
            out.push(item)
        self.tuples_out += 1
        return True

    def _take(self, channel: Channel, text: str) -> AnnotationTuple:
        item = channel.pop()
        self.tuples_in += 1
        self.cycles += 1
        return item

    def inputs_done(self) -> bool:
        return all(channel.exhausted for channel in self.inputs)

    @abstractmethod
    def consume(self, text: str) -> bool:
        """Take at most one input tuple; True when one was taken."""

    def finish(self, text: str) -> None:
        """End of every input stream; blocking stages release their results here."""

    def step(self, text: str) -> Tuple[bool, bool]:
        """Advance one cycle; returns (did work, changed state)."""
        if self.closed:
            return False, False
        moved = self._flush()
        consumed = False
        changed = False
        if not self._finished:
            if not self.pending:
                consumed = self.consume(text)
            if not consumed and self.inputs_done():
                self.finish(text)
                self._finished = True
                changed = True
        if self._finished and not self.pending:
            for out in self.outputs:
                out.close()
            self.closed = True
            changed = True
        busy = moved or consumed
        return busy, busy or changed


class ExtractStage(Stage):
    """Regex or dictionary scanner attached to the document tap."""

    def __init__(self, name: str, scanner_factory: Callable[[], Any]):
        super().__init__(name)
        self.scanner = scanner_factory()
        self.stream_done = False
        self.chars_read = 0

    @property
    def ready(self) -> bool:
        return not self.pending

    def accept(self, ch: str) -> None:
        self.chars_read += 1
        self.cycles += 1
        self.pending.extend((Span(b, e),) for b, e in self.scanner.feed(ch))

    def end_of_stream(self) -> None:
        self.pending.extend((Span(b, e),) for b, e in self.scanner.finish())
        self.stream_done = True

    def inputs_done(self) -> bool:
        return self.stream_done

    def consume(self, text: str) -> bool:
        return False


def regex_stage(name: str, regex) -> ExtractStage:
    return ExtractStage(name, lambda: StreamingRegexScanner(regex))


def dictionary_stage(name: str, dictionary) -> ExtractStage:
    return ExtractStage(name, lambda: StreamingDictionaryScanner(dictionary))


class InputStage(Stage):
    """Replays a boundary input set handed over by the host."""

    def __init__(self, name: str):
        super().__init__(name)
        self.loaded = False

    def load(self, tuples: List[AnnotationTuple]) -> None:
        self.pending.extend(tuples)
        self.loaded = True

    def inputs_done(self) -> bool:
        return self.loaded

    def consume(self, text: str) -> bool:
        return False


class SelectStage(Stage):
    def __init__(self, name: str, test: RowTest):
        super().__init__(name)
        self.test = test

    def consume(self, text: str) -> bool:
        source = self.inputs[0]
        if source.empty:
            return False
        row = self._take(source, text)
        if self.test(row, text):
            self.pending.append(row)
        return True


class ProjectStage(Stage):
    def __init__(self, name: str, indexes: List[int]):
        super().__init__(name)
        self.indexes = indexes

    def consume(self, text: str) -> bool:
        source = self.inputs[0]
        if source.empty:
            return False
        row = self._take(source, text)
        self.pending.append(tuple(row[i] for i in self.indexes))
        return True


class UnionStage(Stage):
    """Forwards tuples from its inputs in round-robin arrival order."""

    def __init__(self, name: str):
        super().__init__(name)
        self._next = 0

    def consume(self, text: str) -> bool:
        count = len(self.inputs)
        for offset in range(count):
            index = (self._next + offset) % count
            if not self.inputs[index].empty:
                self.pending.append(self._take(self.inputs[index], text))
                self._next = (index + 1) % count
                return True
        return False


class _OrderCheck:
    def __init__(self, stage: str, side: str, key: Key):
        self.stage = stage
        self.side = side
        self.key = key
        self.last: Any = None

    def __call__(self, row: AnnotationTuple) -> None:
        current = self.key(row)
        if self.last is not None and current < self.last:
            raise StageError(self.stage, f"unsorted {self.side} input: {current} after {self.last}")
        self.last = current


class JoinStage(Stage):
    """Span join over sorted inputs; blocks until both sides end."""

    def __init__(self, name: str, test: RowTest, left_key: Key, right_key: Key, output_key: Key):
        super().__init__(name)
        self.test = test
        self.output_key = output_key
        self.checks = (_OrderCheck(name, "left", left_key), _OrderCheck(name, "right", right_key))
        self.sides: Tuple[List[AnnotationTuple], List[AnnotationTuple]] = ([], [])
        self._turn = 0

    def consume(self, text: str) -> bool:
        for offset in range(2):
            side = (self._turn + offset) % 2
            if not self.inputs[side].empty:
                row = self._take(self.inputs[side], text)
                self.checks[side](row)
                self.sides[side].append(row)
                self._turn = 1 - side
                return True
        return False

    def finish(self, text: str) -> None:
        left, right = self.sides
        rows = [l + r for l in left for r in right if self.test(l + r, text)]
        self.pending.extend(sorted(rows, key=self.output_key))


class ConsolidateStage(Stage):
    """Streaming contained-within consolidation over input sorted by span.

    Tuples sharing a begin offset form a group; a group is decided once the
    next begin arrives, using the largest end seen in earlier groups.
    """

    def __init__(self, name: str, key: Key):
        super().__init__(name)
        self.check = _OrderCheck(name, "input", key)
        self.group: List[AnnotationTuple] = []
        self.group_begin: Optional[int] = None
        self.prior_max_end = -1

    def _decide(self) -> None:
        if not self.group:
            return
        group_max_end = max(row[0].end for row in self.group)
        for row in self.group:
            end = row[0].end
            if end < group_max_end or self.prior_max_end >= end:
                continue
            self.pending.append(row)
        self.prior_max_end = max(self.prior_max_end, group_max_end)
        self.group = []

    def consume(self, text: str) -> bool:
        source = self.inputs[0]
        if source.empty:
            return False
        row = self._take(source, text)
        self.check(row)
        if row[0].begin != self.group_begin:
            self._decide()
            self.group_begin = row[0].begin
        self.group.append(row)
        return True

    def finish(self, text: str) -> None:
        self._decide()


class SortStage(Stage):
    """Sorting buffer placed on a stream that is not guaranteed ordered."""

    def __init__(self, name: str, key: Key, capacity: int):
        super().__init__(name)
        self.buffer = SortingBuffer(name, key, capacity)

    def consume(self, text: str) -> bool:
        source = self.inputs[0]
        if source.empty:
            return False
        self.pending.extend(self.buffer.push(self._take(source, text)))
        return True

    def finish(self, text: str) -> None:
        self.pending.extend(self.buffer.drain())


class DocumentTap:
    """Streams the document one character per cycle to every extraction stage.

    The tap stalls while any extraction stage still holds unsent matches.
    """

    def __init__(self, text: str, stages: List[ExtractStage]):
        self.text = text
        self.stages = stages
        self.position = 0
        self.finished = not stages

    def step(self) -> Tuple[bool, bool]:
        if self.finished:
            return False, False
        if not all(stage.ready for stage in self.stages):
            return False, False
        if self.position < len(self.text):
            ch = self.text[self.position]
            for stage in self.stages:
                stage.accept(ch)
            self.position += 1
            return True, True
        for stage in self.stages:
            stage.end_of_stream()
        self.finished = True
        return False, True
