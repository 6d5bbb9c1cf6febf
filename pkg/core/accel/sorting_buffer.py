"""
Sorting buffer - bounded reorder window between streaming stages.

Tuples are held in a heap until the buffer exceeds its capacity, then the
smallest is released. A tuple that arrives below the last released key can
no longer be placed correctly, which is reported as an overflow.
"""

import heapq
from itertools import count
from typing import Any, Callable, List, Tuple

from ..exceptions import SortingBufferOverflowError
from ..models.annotations import AnnotationTuple

DEFAULT_CAPACITY = 1024


class SortingBuffer:
    def __init__(self, name: str, key: Callable[[AnnotationTuple], Any], capacity: int = DEFAULT_CAPACITY):
        if capacity < 1:
            raise ValueError(f"sorting buffer capacity must be at least 1, got {capacity}")
        self.name = name
        self.key = key
        self.capacity = capacity
        self._heap: List[Tuple[Any, int, AnnotationTuple]] = []
        self._sequence = count()
        self._watermark: Any = None
        self.peak = 0

    def __len__(self) -> int:
        return len(self._heap)

    def push(self, item: AnnotationTuple) -> List[AnnotationTuple]:
        """Insert one tuple; returns the tuples released to keep within capacity."""
        key = self.key(item)
        if self._watermark is not None and key < self._watermark:
            raise SortingBufferOverflowError(
                self.name,
                f"out-of-order tuple {key} after {self.capacity} buffered tuples released {self._watermark}",
            )
        heapq.heappush(self._heap, (key, next(self._sequence), item))
        self.peak = max(self.peak, len(self._heap))
        released = []
        while len(self._heap) > self.capacity:
            key, _, smallest = heapq.heappop(self._heap)
            self._watermark = key
            released.append(smallest)
        return released

    def drain(self) -> List[AnnotationTuple]:
        """Release everything in key order (end of stream)."""
        released = []
        while self._heap:
            key, _, item = heapq.heappop(self._heap)
            self._watermark = key
            released.append(item)
        return released
