"""Profiling and estimation models."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..exceptions import EstimatorError, UserInputError


@dataclass
class ProfileReport:
    """Per-operator accumulated wall time for one run."""
    total_s: float
    bytes: int
    threads: int
    per_node: Dict[int, float] = field(default_factory=dict)
    per_kind: Dict[str, float] = field(default_factory=dict)
    docs: int = 0

    @property
    def operator_s(self) -> float:
        return sum(self.per_node.values())

    @property
    def throughput(self) -> float:
        """Measured bytes per second over the run's wall time (0 for an empty run)."""
        return self.bytes / self.total_s if self.total_s > 0 else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return ProfileDocument(
            total_s=self.total_s,
            bytes=self.bytes,
            threads=self.threads,
            docs=self.docs,
            per_node={str(k): v for k, v in sorted(self.per_node.items())},
            per_kind=dict(sorted(self.per_kind.items())),
        ).model_dump()

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ProfileReport":
        try:
            doc = ProfileDocument.model_validate(data)
            per_node = {int(k): v for k, v in doc.per_node.items()}
        except (ValidationError, ValueError) as exc:
            raise UserInputError(f"malformed profile: {exc}")
        return cls(doc.total_s, doc.bytes, doc.threads, per_node, dict(doc.per_kind), doc.docs)


class ProfileDocument(BaseModel):
    """On-disk profile layout."""
    model_config = ConfigDict(extra="ignore")

    total_s: float = Field(ge=0)
    bytes: int = Field(ge=0)
    threads: int = Field(ge=1)
    docs: int = Field(default=0, ge=0)
    per_node: Dict[str, float] = Field(default_factory=dict)
    per_kind: Dict[str, float] = Field(default_factory=dict)


@dataclass(frozen=True)
class EstimateInput:
    tp_sw: float
    tp_hw: float
    rt_sw: float

    def __post_init__(self):
        if not self.tp_sw > 0:
            raise EstimatorError(f"tp_SW must be positive, got {self.tp_sw}")
        if not self.tp_hw > 0:
            raise EstimatorError(f"tp_HW must be positive, got {self.tp_hw}")
        if not 0.0 <= self.rt_sw <= 1.0:
            raise EstimatorError(f"rt_SW must lie in [0, 1], got {self.rt_sw}")


class Accounting(str, Enum):
    PESSIMISTIC = "pessimistic"  # ignores CPU/accelerator overlap
    OPTIMISTIC = "optimistic"  # ignores per-subgraph communication cost


@dataclass(frozen=True)
class ScenarioRow:
    """One line of a speedup table."""
    scenario: int
    doc_size: int
    rt_sw: float
    tp_sw: float
    tp_hw: float
    tp_est: float
    speedup: float
    accounting: Accounting
    offloaded_nodes: int = 0
    note: Optional[str] = None

    @property
    def no_benefit(self) -> bool:
        return self.speedup <= 1.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scenario": self.scenario,
            "doc_size": self.doc_size,
            "rt_sw": self.rt_sw,
            "tp_sw": self.tp_sw,
            "tp_hw": self.tp_hw,
            "tp_est": self.tp_est,
            "speedup": self.speedup,
            "accounting": self.accounting.value,
            "offloaded_nodes": self.offloaded_nodes,
            "note": self.note,
        }
