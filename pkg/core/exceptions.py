"""
Exceptions - Error hierarchy shared by every spanforge layer.

Errors split into two branches: problems with what the user handed us
(queries, graphs, corpora, configuration) and violations of the engine's own
invariants. The CLI maps the first branch to exit code 1 and the second to
exit code 2.
"""

from typing import List, Optional


class SpanForgeError(Exception):
    """Base class for all spanforge errors."""


class UserInputError(SpanForgeError):
    """Bad input: malformed query, graph, corpus or configuration."""


class InvariantViolation(SpanForgeError):
    """Internal invariant broken; indicates a bug rather than bad input."""


# Front-end

class AqlSyntaxError(UserInputError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class AqlResolutionError(UserInputError):
    """Undefined or duplicate view / dictionary reference."""


# Graph model

class GraphCycleError(UserInputError):
    def __init__(self, nodes: List[int], message: Optional[str] = None):
        super().__init__(message or f"cycle through nodes {nodes}")
        self.nodes = nodes


class GraphValidationError(UserInputError):
    """Graph failed validation; carries the report findings."""

    def __init__(self, findings: List[str]):
        super().__init__("; ".join(findings))
        self.findings = findings


class SchemaError(UserInputError):
    """Schema mismatch or unknown column."""


class AogFormatError(UserInputError):
    """Malformed AOG / plan interchange document."""


class UnknownOperatorKindError(AogFormatError):
    def __init__(self, kind: str):
        super().__init__(f"unknown operator kind: {kind!r}")
        self.kind = kind


# Operators

class OperatorError(UserInputError):
    """Operator could not evaluate its input (bad predicate, missing column)."""


class RegexSyntaxError(UserInputError):
    def __init__(self, pattern: str, position: int, message: str):
        super().__init__(f"regex /{pattern}/ at {position}: {message}")
        self.pattern = pattern
        self.position = position


class RegexTooComplexError(UserInputError):
    def __init__(self, pattern: str, budget: int):
        super().__init__(f"regex /{pattern}/ exceeds the state budget of {budget}")
        self.pattern = pattern
        self.budget = budget


# Partitioning / accelerator

class PartitionError(UserInputError):
    """Subgraph set not convex, or boundary schema underivable."""


class PipelineBuildError(UserInputError):
    """Subgraph cannot be compiled into a streaming pipeline."""


class StageError(SpanForgeError):
    """Per-document failure inside a pipeline stage."""

    def __init__(self, stage: str, reason: str):
        super().__init__(f"stage {stage}: {reason}")
        self.stage = stage
        self.reason = reason


class SortingBufferOverflowError(StageError):
    pass


class PipelineDeadlockError(InvariantViolation):
    def __init__(self, blocked_stages: List[str]):
        super().__init__(f"pipeline made no progress; blocked stages: {blocked_stages}")
        self.blocked_stages = blocked_stages


# Runtime / profiling

class CorpusNotFoundError(UserInputError):
    def __init__(self, path: str):
        super().__init__(f"corpus not found: {path}")
        self.path = path


class DispatchInvariantError(InvariantViolation):
    """Unknown or duplicate completion signal, or a ticket released twice."""


class ConfigError(UserInputError):
    """Configuration value missing or out of range."""


class EstimatorError(UserInputError):
    """Estimator inputs violate their preconditions."""


class ProfileMismatchError(UserInputError):
    """A plan references nodes the profile does not know."""
