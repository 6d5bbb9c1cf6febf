"""Core models for spanforge."""

from .annotations import AnnotationSet, Column, ColumnType, Document, Schema, Span
from .dispatch import CompletionSignal, DispatchConfig, PackageReason, WorkPackage
from .graph import Edge, OperatorGraph, OperatorKind, OperatorNode, OutputRef
from .plan import HOST, PartitionPlan, Subgraph
from .profile import Accounting, EstimateInput, ProfileReport, ScenarioRow

__all__ = [
    "Accounting",
    "AnnotationSet",
    "Column",
    "ColumnType",
    "CompletionSignal",
    "DispatchConfig",
    "Document",
    "Edge",
    "EstimateInput",
    "HOST",
    "OperatorGraph",
    "OperatorKind",
    "OperatorNode",
    "OutputRef",
    "PackageReason",
    "PartitionPlan",
    "ProfileReport",
    "ScenarioRow",
    "Schema",
    "Span",
    "Subgraph",
    "WorkPackage",
]
