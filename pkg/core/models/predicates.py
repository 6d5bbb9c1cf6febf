"""
Predicate expressions for Select and Join operators.

Predicates are small immutable trees. Their interchange form is the nested
array notation used in AOG files, e.g. ``["Follows", "a", "b", 0, 5]``.
"""

from dataclasses import dataclass
from typing import Any, Callable, Dict, FrozenSet, List

from ..exceptions import AogFormatError


class Predicate:
    """Base class for predicate tree nodes."""

    def to_json(self) -> List[Any]:
        raise NotImplementedError

    def columns(self) -> FrozenSet[str]:
        raise NotImplementedError

    def rename(self, mapping: Callable[[str], str]) -> "Predicate":
        raise NotImplementedError


@dataclass(frozen=True)
class Follows(Predicate):
    """min_gap <= right.begin - left.end <= max_gap"""
    left: str
    right: str
    min_gap: int
    max_gap: int

    def to_json(self) -> List[Any]:
        return ["Follows", self.left, self.right, self.min_gap, self.max_gap]

    def columns(self) -> FrozenSet[str]:
        return frozenset((self.left, self.right))

    def rename(self, mapping):
        return Follows(mapping(self.left), mapping(self.right), self.min_gap, self.max_gap)


@dataclass(frozen=True)
class Contains(Predicate):
    outer: str
    inner: str

    def to_json(self) -> List[Any]:
        return ["Contains", self.outer, self.inner]

    def columns(self) -> FrozenSet[str]:
        return frozenset((self.outer, self.inner))

    def rename(self, mapping):
        return Contains(mapping(self.outer), mapping(self.inner))


@dataclass(frozen=True)
class Overlaps(Predicate):
    left: str
    right: str

    def to_json(self) -> List[Any]:
        return ["Overlaps", self.left, self.right]

    def columns(self) -> FrozenSet[str]:
        return frozenset((self.left, self.right))

    def rename(self, mapping):
        return Overlaps(mapping(self.left), mapping(self.right))


@dataclass(frozen=True)
class SpanLengthGreaterThan(Predicate):
    column: str
    k: int

    def to_json(self) -> List[Any]:
        return ["SpanLengthGreaterThan", self.column, self.k]

    def columns(self) -> FrozenSet[str]:
        return frozenset((self.column,))

    def rename(self, mapping):
        return SpanLengthGreaterThan(mapping(self.column), self.k)


@dataclass(frozen=True)
class MatchesRegex(Predicate):
    """The text covered by the column fully matches the pattern."""
    column: str
    pattern: str

    def to_json(self) -> List[Any]:
        return ["MatchesRegex", self.column, self.pattern]

    def columns(self) -> FrozenSet[str]:
        return frozenset((self.column,))

    def rename(self, mapping):
        return MatchesRegex(mapping(self.column), self.pattern)


@dataclass(frozen=True)
class And(Predicate):
    left: Predicate
    right: Predicate

    def to_json(self) -> List[Any]:
        return ["And", self.left.to_json(), self.right.to_json()]

    def columns(self) -> FrozenSet[str]:
        return self.left.columns() | self.right.columns()

    def rename(self, mapping):
        return And(self.left.rename(mapping), self.right.rename(mapping))


@dataclass(frozen=True)
class Or(Predicate):
    left: Predicate
    right: Predicate

    def to_json(self) -> List[Any]:
        return ["Or", self.left.to_json(), self.right.to_json()]

    def columns(self) -> FrozenSet[str]:
        return self.left.columns() | self.right.columns()

    def rename(self, mapping):
        return Or(self.left.rename(mapping), self.right.rename(mapping))


@dataclass(frozen=True)
class Not(Predicate):
    operand: Predicate

    def to_json(self) -> List[Any]:
        return ["Not", self.operand.to_json()]

    def columns(self) -> FrozenSet[str]:
        return self.operand.columns()

    def rename(self, mapping):
        return Not(self.operand.rename(mapping))


SPAN_PAIR_PREDICATES = (Follows, Contains, Overlaps)

_ARITY: Dict[str, int] = {
    "Follows": 4,
    "Contains": 2,
    "Overlaps": 2,
    "SpanLengthGreaterThan": 2,
    "MatchesRegex": 2,
    "And": 2,
    "Or": 2,
    "Not": 1,
}


def _expect(condition: bool, data: Any, what: str) -> None:
    if not condition:
        raise AogFormatError(f"malformed predicate {data!r}: {what}")


def predicate_from_json(data: Any) -> Predicate:
    """Parse the nested-array predicate notation."""
    _expect(isinstance(data, (list, tuple)) and len(data) > 0, data, "expected a non-empty array")
    name, args = data[0], list(data[1:])
    _expect(name in _ARITY, data, f"unknown predicate {name!r}")
    _expect(len(args) == _ARITY[name], data, f"{name} takes {_ARITY[name]} arguments")

    if name in ("And", "Or"):
        left, right = predicate_from_json(args[0]), predicate_from_json(args[1])
        return And(left, right) if name == "And" else Or(left, right)
    if name == "Not":
        return Not(predicate_from_json(args[0]))

    _expect(isinstance(args[0], str), data, "column name expected")
    if name == "SpanLengthGreaterThan":
        _expect(isinstance(args[1], int) and not isinstance(args[1], bool), data, "integer length expected")
        return SpanLengthGreaterThan(args[0], args[1])
    if name == "MatchesRegex":
        _expect(isinstance(args[1], str), data, "pattern string expected")
        return MatchesRegex(args[0], args[1])

    _expect(isinstance(args[1], str), data, "column name expected")
    if name == "Follows":
        _expect(all(isinstance(a, int) and not isinstance(a, bool) for a in args[2:]), data,
                "integer gap bounds expected")
        _expect(args[2] <= args[3], data, "min gap exceeds max gap")
        return Follows(args[0], args[1], args[2], args[3])
    if name == "Contains":
        return Contains(args[0], args[1])
    return Overlaps(args[0], args[1])
