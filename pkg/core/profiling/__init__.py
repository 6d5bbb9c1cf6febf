"""Profiling and throughput estimation.

``throughput_scan`` lives in ``core.profiling.scan``; it drives the runtime and
is imported from there directly.
"""

from .estimator import accounting_for, estimate_throughput, speedup_report
from .profiler import (
    build_profile,
    category_distribution,
    merge_timings,
    relative_distribution,
    software_residue,
)

__all__ = [
    "accounting_for",
    "build_profile",
    "category_distribution",
    "estimate_throughput",
    "merge_timings",
    "relative_distribution",
    "software_residue",
    "speedup_report",
]
