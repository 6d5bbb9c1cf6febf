"""
Profiler - per-operator time accounting and relative distributions.

Worker threads accumulate wall time per node into private dictionaries; the
runner hands them over at the end of a run and they are merged here, so no
timing state is shared while documents are being processed.
"""

from typing import Dict, Iterable, Mapping, Set

from ..exceptions import EstimatorError, ProfileMismatchError
from ..models.graph import EXTRACTION_KINDS, RELATIONAL_KINDS, OperatorGraph
from ..models.profile import ProfileReport


def merge_timings(timings: Iterable[Mapping[int, float]]) -> Dict[int, float]:
    merged: Dict[int, float] = {}
    for part in timings:
        for node_id, seconds in part.items():
            merged[node_id] = merged.get(node_id, 0.0) + seconds
    return merged


def build_profile(
    graph: OperatorGraph,
    timings: Iterable[Mapping[int, float]],
    total_s: float,
    bytes: int,
    threads: int,
    docs: int = 0,
) -> ProfileReport:
    """Merge per-worker timings into a report covering every node of ``graph``."""
    merged = merge_timings(timings)
    per_node = {node_id: merged.get(node_id, 0.0) for node_id in graph.node_ids}
    per_kind: Dict[str, float] = {}
    for node_id, seconds in per_node.items():
        kind = graph.nodes[node_id].kind.value
        per_kind[kind] = per_kind.get(kind, 0.0) + seconds
    return ProfileReport(total_s, bytes, threads, per_node, per_kind, docs)


def relative_distribution(report: ProfileReport) -> Dict[str, float]:
    """Fraction of operator time per operator kind; sums to 1."""
    total = sum(report.per_kind.values())
    if total <= 0:
        raise EstimatorError("empty profile: no operator time recorded")
    return {kind: seconds / total for kind, seconds in sorted(report.per_kind.items())}


def category_distribution(report: ProfileReport) -> Dict[str, float]:
    """Extraction / relational / other split of the relative distribution."""
    extraction = {kind.value for kind in EXTRACTION_KINDS}
    relational = {kind.value for kind in RELATIONAL_KINDS}
    split = {"extraction": 0.0, "relational": 0.0, "other": 0.0}
    for kind, fraction in relative_distribution(report).items():
        if kind in extraction:
            split["extraction"] += fraction
        elif kind in relational:
            split["relational"] += fraction
        else:
            split["other"] += fraction
    return split


def software_residue(report: ProfileReport, offloaded: Set[int]) -> float:
    """Fraction of profiled operator time spent outside ``offloaded`` (rt_SW)."""
    unknown = sorted(offloaded - set(report.per_node))
    if unknown:
        raise ProfileMismatchError(f"plan offloads nodes absent from the profile: {unknown}")
    total = report.operator_s
    if total <= 0:
        raise EstimatorError("empty profile: no operator time recorded")
    moved = sum(report.per_node[node_id] for node_id in offloaded)
    return min(1.0, max(0.0, 1.0 - moved / total))
