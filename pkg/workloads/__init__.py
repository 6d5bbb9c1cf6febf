"""
Demo workloads: rule programs shaped like the T1 to T5 queries and the
synthetic corpus they run on.
"""

from .base_workload import Workload, WorkloadCategory, WorkloadInfo
from .corpus_generator import DOC_SIZES, generate_corpus, generate_size_sweep
from .workload_registry import WorkloadRegistry, get_registry

__all__ = [
    "DOC_SIZES",
    "Workload",
    "WorkloadCategory",
    "WorkloadInfo",
    "WorkloadRegistry",
    "generate_corpus",
    "generate_size_sweep",
    "get_registry",
]
