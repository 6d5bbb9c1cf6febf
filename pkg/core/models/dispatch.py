"""Dispatch models: work packages, completion signals and batching settings."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from ..exceptions import ConfigError
from .annotations import AnnotationSet, Document


class PackageReason(str, Enum):
    """Which packing rule emitted a package."""
    BYTES = "bytes"
    MAX_DOCS = "max_docs"
    TIMEOUT = "timeout"
    DRAIN = "drain"


class SignalStatus(str, Enum):
    OK = "ok"
    ERROR = "error"


@dataclass(frozen=True)
class DispatchConfig:
    byte_threshold: int = 1000
    max_docs_per_package: int = 8
    flush_timeout_s: float = 0.001
    worker_threads: int = 1

    def __post_init__(self):
        for name in ("byte_threshold", "max_docs_per_package", "worker_threads"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.flush_timeout_s <= 0:
            raise ConfigError(f"flush_timeout must be positive, got {self.flush_timeout_s}")


@dataclass(frozen=True)
class PackageEntry:
    ticket: int
    document: Document
    submitted_at: float = 0.0
    # SubgraphCall inputs in slot order; the document slot holds None.
    inputs: Tuple[Optional[AnnotationSet], ...] = ()


@dataclass
class WorkPackage:
    id: int
    subgraph: int
    entries: List[PackageEntry]
    reason: PackageReason

    @property
    def payload_bytes(self) -> int:
        return sum(e.document.payload_bytes for e in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class EntryError:
    stage: str
    reason: str

    def __str__(self) -> str:
        return f"stage {self.stage}: {self.reason}"


@dataclass
class CompletionSignal:
    """Accelerator status for one package: per-ticket port results or errors."""
    package_id: int
    results: Dict[int, List[AnnotationSet]] = field(default_factory=dict)
    errors: Dict[int, EntryError] = field(default_factory=dict)
    cycles: int = 0
    makespan: int = 0
    fatal: Optional[str] = None

    @property
    def status(self) -> SignalStatus:
        return SignalStatus.ERROR if self.errors or self.fatal else SignalStatus.OK


@dataclass
class DispatchStats:
    packages: int = 0
    reasons: Dict[str, int] = field(default_factory=lambda: {r.value: 0 for r in PackageReason})
    wakeups: int = 0
    entries: int = 0
    cycles: int = 0
    makespan_cycles: int = 0  # packages run back to back
    accel_bytes: int = 0

    @property
    def mean_docs_per_package(self) -> float:
        return self.entries / self.packages if self.packages else 0.0

    def simulated_throughput(self, clock_hz: float) -> float:
        """Accelerator bytes per second implied by the summed package makespans."""
        if not self.makespan_cycles:
            return 0.0
        return self.accel_bytes * clock_hz / self.makespan_cycles

    def record(self, package: WorkPackage) -> None:
        self.packages += 1
        self.entries += len(package)
        self.accel_bytes += package.payload_bytes
        self.reasons[package.reason.value] += 1

    def to_dict(self) -> Dict[str, object]:
        return {
            "packages": self.packages,
            "reasons": dict(self.reasons),
            "wakeups": self.wakeups,
            "mean_docs_per_package": self.mean_docs_per_package,
            "cycles": self.cycles,
            "makespan_cycles": self.makespan_cycles,
            "accel_bytes": self.accel_bytes,
        }
