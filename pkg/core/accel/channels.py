"""Bounded elastic channels between pipeline stages."""

from collections import deque
from typing import Any, Callable, Deque, Optional

from ..models.annotations import AnnotationTuple


class Channel:
    """FIFO link with a fixed capacity; a full channel stalls its producer.

    ``close`` marks end of stream. When a key function is given the channel
    records whether the tuples it carried were nondecreasing under that key.
    """

    def __init__(
        self,
        name: str,
        capacity: int,
        key: Optional[Callable[[AnnotationTuple], Any]] = None,
        requires_order: bool = False,
    ):
        if capacity < 1:
            raise ValueError(f"channel capacity must be at least 1, got {capacity}")
        self.name = name
        self.capacity = capacity
        self.key = key
        self.requires_order = requires_order
        self.items: Deque[AnnotationTuple] = deque()
        self.closed = False
        self.pushed = 0
        self.high_water = 0
        self.ordered = True
        self._last_key: Any = None

    @property
    def has_space(self) -> bool:
        return len(self.items) < self.capacity

    @property
    def empty(self) -> bool:
        return not self.items

    @property
    def exhausted(self) -> bool:
        return self.closed and not self.items

    def push(self, item: AnnotationTuple) -> None:
        if self.closed:
            raise RuntimeError(f"push on closed channel {self.name}")
        if not self.has_space:
            raise RuntimeError(f"push on full channel {self.name}")
        if self.key is not None:
            current = self.key(item)
            if self._last_key is not None and current < self._last_key:
                self.ordered = False
            self._last_key = current
        self.items.append(item)
        self.pushed += 1
        self.high_water = max(self.high_water, len(self.items))

    def pop(self) -> AnnotationTuple:
        return self.items.popleft()

    def close(self) -> None:
        self.closed = True

    def __repr__(self) -> str:
        state = "closed" if self.closed else "open"
        return f"Channel({self.name}, {len(self.items)}/{self.capacity}, {state})"
