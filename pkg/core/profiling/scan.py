"""
Thread scan - measured software throughput against worker thread count.
"""

from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

from loguru import logger

from ..models.dispatch import DispatchConfig
from ..models.plan import PartitionPlan
from ..operators.dictionary import Dictionary
from ..runtime.corpus import CorpusItem
from ..runtime.runner import run_corpus


def throughput_scan(
    plan: PartitionPlan,
    corpus: Sequence[CorpusItem],
    thread_counts: Sequence[int],
    config: Optional[DispatchConfig] = None,
    dictionaries: Optional[Mapping[str, Dictionary]] = None,
    base_dir: Optional[Path] = None,
    **run_options,
) -> List[Dict[str, float]]:
    """Run the corpus once per thread count; rows of (threads, bytes, seconds, throughput)."""
    base = config or DispatchConfig()
    rows = []
    for threads in thread_counts:
        dispatch = replace(base, worker_threads=threads)
        result = run_corpus(plan, corpus, dispatch, dictionaries=dictionaries, base_dir=base_dir, **run_options)
        profile = result.profile
        rows.append({
            "threads": threads,
            "bytes": profile.bytes,
            "seconds": profile.total_s,
            "throughput": profile.throughput if profile.bytes else 0.0,
        })
        logger.info(f"Scan: {threads} thread(s) -> {rows[-1]['throughput'] / 1e6:.2f} MB/s")
    return rows
