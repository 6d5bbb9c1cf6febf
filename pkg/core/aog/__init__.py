"""Operator-graph utilities: validation, ordering, schema inference and the AOG file format."""

from .ordering import topo_order
from .schemas import DOCUMENT_SCHEMA, infer_schemas, node_output_schema
from .serialization import AOG_VERSION, deserialize_aog, deserialize_plan, serialize_aog, serialize_plan
from .validation import ValidationFinding, ValidationReport, validate_graph

__all__ = [
    "AOG_VERSION",
    "DOCUMENT_SCHEMA",
    "ValidationFinding",
    "ValidationReport",
    "deserialize_aog",
    "deserialize_plan",
    "infer_schemas",
    "node_output_schema",
    "serialize_aog",
    "serialize_plan",
    "topo_order",
    "validate_graph",
]
