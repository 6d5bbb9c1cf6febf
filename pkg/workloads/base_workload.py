"""
Base Workload - Abstract base class for all demo workloads.

A workload is a rule program plus the shape of the corpus it is meant to run
on. The demo, the profile sanity checks and the scenario projections all go
through this contract.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

from core.aql import compile_aql
from core.models.graph import OperatorGraph


class WorkloadCategory(str, Enum):
    EXTRACTION = "extraction"
    RELATIONAL = "relational"


@dataclass(frozen=True)
class WorkloadInfo:
    name: str
    description: str
    category: WorkloadCategory
    default_doc_size: int


class Workload(ABC):
    """Abstract base class that all demo workloads must implement."""

    @abstractmethod
    def get_workload_name(self) -> str:
        """Return the unique identifier for this workload (T1 ... T5)."""
        pass

    @abstractmethod
    def get_workload_description(self) -> str:
        pass

    @abstractmethod
    def get_category(self) -> WorkloadCategory:
        """Which operator family is expected to dominate the profile."""
        pass

    @abstractmethod
    def get_query(self) -> str:
        """Return the rule program source."""
        pass

    def get_default_doc_size(self) -> int:
        return 256

    def compile(self, base_dir: Optional[Path] = None) -> OperatorGraph:
        return compile_aql(self.get_query(), base_dir)

    def info(self) -> WorkloadInfo:
        return WorkloadInfo(
            name=self.get_workload_name(),
            description=self.get_workload_description(),
            category=self.get_category(),
            default_doc_size=self.get_default_doc_size(),
        )
