"""Annotation data model: spans, schemas, documents and annotation sets."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from ..exceptions import SchemaError

SPAN_OFFSET_LIMIT = 2 ** 32


@dataclass(frozen=True, order=True, slots=True)
class Span:
    """Half-open character range [begin, end) into a document."""
    begin: int
    end: int

    def __post_init__(self):
        if not 0 <= self.begin <= self.end < SPAN_OFFSET_LIMIT:
            raise ValueError(f"invalid span ({self.begin}, {self.end})")

    @property
    def length(self) -> int:
        return self.end - self.begin

    def to_dict(self) -> Dict[str, int]:
        return {"begin": self.begin, "end": self.end}


class ColumnType(str, Enum):
    SPAN = "Span"
    INTEGER = "Integer"
    FLOAT = "Float"
    BOOLEAN = "Boolean"
    TEXT = "Text"


@dataclass(frozen=True)
class Column:
    name: str
    type: ColumnType


@dataclass(frozen=True)
class Schema:
    """Ordered, uniquely named column list."""
    columns: Tuple[Column, ...] = ()

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate column names in schema {names}")

    @classmethod
    def of(cls, *pairs: Tuple[str, ColumnType]) -> "Schema":
        return cls(tuple(Column(name, ColumnType(kind)) for name, kind in pairs))

    @property
    def names(self) -> List[str]:
        return [c.name for c in self.columns]

    @property
    def arity(self) -> int:
        return len(self.columns)

    def index_of(self, name: str) -> int:
        for i, column in enumerate(self.columns):
            if column.name == name:
                return i
        raise SchemaError(f"unknown column {name!r}; schema has {self.names}")

    def type_of(self, name: str) -> ColumnType:
        return self.columns[self.index_of(name)].type

    @property
    def first_span_index(self) -> Optional[int]:
        for i, column in enumerate(self.columns):
            if column.type == ColumnType.SPAN:
                return i
        return None

    def project(self, names: Sequence[str]) -> "Schema":
        return Schema(tuple(self.columns[self.index_of(n)] for n in names))

    def concat(self, right: "Schema") -> "Schema":
        """Left columns followed by right columns, renaming right-side collisions."""
        return Schema(tuple(self.columns) + tuple(
            Column(name, column.type)
            for name, column in zip(join_column_names(self, right), right.columns)
        ))

    def to_list(self) -> List[List[str]]:
        return [[c.name, c.type.value] for c in self.columns]

    @classmethod
    def from_list(cls, data: Iterable[Sequence[str]]) -> "Schema":
        return cls(tuple(Column(name, ColumnType(kind)) for name, kind in data))

    def __str__(self) -> str:
        return "(" + ", ".join(f"{c.name}: {c.type.value}" for c in self.columns) + ")"


def join_column_names(left: Schema, right: Schema) -> List[str]:
    """Output names of the right-side columns of a join; collisions get _1, _2, ..."""
    taken = set(left.names)
    renamed = []
    for column in right.columns:
        name = column.name
        suffix = 1
        while name in taken:
            name = f"{column.name}_{suffix}"
            suffix += 1
        taken.add(name)
        renamed.append(name)
    return renamed


@dataclass(frozen=True)
class Document:
    id: str
    text: str

    @property
    def payload_bytes(self) -> int:
        return len(self.text.encode("utf-8"))


AnnotationTuple = Tuple[Any, ...]


def _value_key(value: Any) -> Any:
    if isinstance(value, Span):
        return (value.begin, value.end)
    return value


def canonical_key(schema: Schema) -> Callable[[AnnotationTuple], Tuple[Any, ...]]:
    """Sort key: first Span column's (begin, end), then the remaining columns in order."""
    first = schema.first_span_index
    if first is None:
        return lambda row: tuple(_value_key(v) for v in row)
    rest = [i for i in range(schema.arity) if i != first]

    def key(row: AnnotationTuple) -> Tuple[Any, ...]:
        span = row[first]
        return ((span.begin, span.end),) + tuple(_value_key(row[i]) for i in rest)

    return key


@dataclass
class AnnotationSet:
    """Bag of tuples conforming to one schema, kept in canonical order."""
    schema: Schema
    tuples: List[AnnotationTuple] = field(default_factory=list)

    @classmethod
    def canonical(cls, schema: Schema, tuples: Iterable[AnnotationTuple]) -> "AnnotationSet":
        return cls(schema, sorted(tuples, key=canonical_key(schema)))

    @classmethod
    def of_spans(cls, spans: Iterable[Tuple[int, int]], column: str = "match") -> "AnnotationSet":
        schema = Schema.of((column, ColumnType.SPAN))
        return cls.canonical(schema, [(Span(b, e),) for b, e in spans])

    def __len__(self) -> int:
        return len(self.tuples)

    def is_canonical(self) -> bool:
        key = canonical_key(self.schema)
        keys = [key(t) for t in self.tuples]
        return all(a <= b for a, b in zip(keys, keys[1:]))

    def spans(self, column: Optional[str] = None) -> List[Tuple[int, int]]:
        index = self.schema.index_of(column) if column else self.schema.first_span_index
        if index is None:
            raise SchemaError("annotation set has no Span column")
        return [(t[index].begin, t[index].end) for t in self.tuples]

    def row_dicts(self) -> List[Dict[str, Any]]:
        names = self.schema.names
        return [
            {name: value.to_dict() if isinstance(value, Span) else value
             for name, value in zip(names, row)}
            for row in self.tuples
        ]
