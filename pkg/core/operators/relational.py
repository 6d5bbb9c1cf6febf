"""
Relational operators over materialized annotation sets.

Bag semantics throughout; every operator returns its result in canonical
order. Spans are half-open intervals.
"""

from functools import lru_cache
from typing import Callable, List, Sequence, Tuple

from ..aog.schemas import check_predicate
from ..exceptions import OperatorError, SchemaError
from ..models.annotations import AnnotationSet, AnnotationTuple, ColumnType, Schema, Span
from ..models.predicates import (
    And,
    Contains,
    Follows,
    MatchesRegex,
    Not,
    Or,
    Overlaps,
    Predicate,
    SpanLengthGreaterThan,
)
from .regex import compile_regex

RowTest = Callable[[AnnotationTuple, str], bool]


def follows(a: Span, b: Span, min_gap: int, max_gap: int) -> bool:
    return min_gap <= b.begin - a.end <= max_gap


def contains(a: Span, b: Span) -> bool:
    return a.begin <= b.begin and b.end <= a.end


def overlaps(a: Span, b: Span) -> bool:
    return a.begin < b.end and b.begin < a.end


def compile_predicate(predicate: Predicate, schema: Schema) -> RowTest:
    """Turn a predicate tree into ``test(row, document_text) -> bool``."""
    try:
        check_predicate(predicate, schema)
    except SchemaError as exc:
        raise OperatorError(str(exc))

    def build(node: Predicate) -> RowTest:
        if isinstance(node, Follows):
            i, j, lo, hi = schema.index_of(node.left), schema.index_of(node.right), node.min_gap, node.max_gap
            return lambda row, text: follows(row[i], row[j], lo, hi)
        if isinstance(node, Contains):
            i, j = schema.index_of(node.outer), schema.index_of(node.inner)
            return lambda row, text: contains(row[i], row[j])
        if isinstance(node, Overlaps):
            i, j = schema.index_of(node.left), schema.index_of(node.right)
            return lambda row, text: overlaps(row[i], row[j])
        if isinstance(node, SpanLengthGreaterThan):
            i, k = schema.index_of(node.column), node.k
            return lambda row, text: row[i].length > k
        if isinstance(node, MatchesRegex):
            i = schema.index_of(node.column)
            regex = compile_regex(node.pattern)
            if schema.columns[i].type == ColumnType.SPAN:
                return lambda row, text: regex.fullmatch(text[row[i].begin:row[i].end])
            return lambda row, text: regex.fullmatch(row[i])
        if isinstance(node, And):
            left, right = build(node.left), build(node.right)
            return lambda row, text: left(row, text) and right(row, text)
        if isinstance(node, Or):
            left, right = build(node.left), build(node.right)
            return lambda row, text: left(row, text) or right(row, text)
        if isinstance(node, Not):
            operand = build(node.operand)
            return lambda row, text: not operand(row, text)
        raise OperatorError(f"unsupported predicate {node!r}")

    return build(predicate)


@lru_cache(maxsize=1024)
def _row_test(predicate: Predicate, schema: Schema) -> RowTest:
    return compile_predicate(predicate, schema)


@lru_cache(maxsize=1024)
def _join_plan(left: Schema, right: Schema, predicate: Predicate) -> Tuple[Schema, RowTest]:
    schema = join_schema(left, right, predicate)
    return schema, compile_predicate(predicate, schema)


def select(input: AnnotationSet, predicate: Predicate, text: str = "") -> AnnotationSet:
    test = _row_test(predicate, input.schema)
    return AnnotationSet(input.schema, [row for row in input.tuples if test(row, text)])


def project(input: AnnotationSet, columns: Sequence[str]) -> AnnotationSet:
    try:
        schema = input.schema.project(columns)
        indexes = [input.schema.index_of(c) for c in columns]
    except SchemaError as exc:
        raise OperatorError(str(exc))
    return AnnotationSet.canonical(schema, [tuple(row[i] for i in indexes) for row in input.tuples])


def join_schema(left: Schema, right: Schema, predicate: Predicate) -> Schema:
    joined = left.concat(right)
    referenced = predicate.columns()
    left_names = set(joined.names[:left.arity])
    if not referenced & left_names or not referenced - left_names:
        raise OperatorError(f"join predicate {predicate.to_json()} must reference a column of each input")
    return joined


def span_join(left: AnnotationSet, right: AnnotationSet, predicate: Predicate, text: str = "") -> AnnotationSet:
    """Nested-loop join filtered by the predicate."""
    schema, test = _join_plan(left.schema, right.schema, predicate)
    rows = []
    for l in left.tuples:
        for r in right.tuples:
            row = l + r
            if test(row, text):
                rows.append(row)
    return AnnotationSet.canonical(schema, rows)


def union_all(inputs: Sequence[AnnotationSet]) -> AnnotationSet:
    if not inputs:
        raise OperatorError("union of zero inputs")
    schema = inputs[0].schema
    rows: List[AnnotationTuple] = []
    for item in inputs:
        if item.schema != schema:
            raise OperatorError(f"schema mismatch on union: {schema} vs {item.schema}")
        rows.extend(item.tuples)
    return AnnotationSet.canonical(schema, rows)


def consolidate(input: AnnotationSet, policy: str = "contained_within") -> AnnotationSet:
    """Drop every tuple whose leading span lies strictly inside another tuple's span."""
    if policy != "contained_within":
        raise OperatorError(f"unsupported consolidation policy {policy!r}")
    if input.schema.arity == 0 or input.schema.columns[0].type != ColumnType.SPAN:
        raise OperatorError(f"consolidate needs a Span as first column, got {input.schema}")

    order = sorted(range(len(input.tuples)), key=lambda i: (input.tuples[i][0].begin, -input.tuples[i][0].end))
    dropped = set()
    max_end = -1
    max_end_begin = -1  # smallest begin among spans reaching max_end
    for i in order:
        span = input.tuples[i][0]
        if max_end > span.end or (max_end == span.end and max_end_begin < span.begin):
            dropped.add(i)
        if span.end > max_end:
            max_end, max_end_begin = span.end, span.begin
    kept = [row for i, row in enumerate(input.tuples) if i not in dropped]
    return AnnotationSet.canonical(input.schema, kept)
