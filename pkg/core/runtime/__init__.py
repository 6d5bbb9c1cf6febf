"""Runtime: corpus ingestion, batched dispatch and the multi-threaded runner."""

from .corpus import CorpusItem, corpus_from_documents, load_corpus, write_corpus_jsonl
from .dispatch import AcceleratorExecutor, Dispatcher, Ticket, TicketFailed, pack
from .output import annotation_records, view_counts, write_annotations_jsonl
from .runner import RunResult, run_corpus

__all__ = [
    "AcceleratorExecutor",
    "CorpusItem",
    "Dispatcher",
    "RunResult",
    "Ticket",
    "TicketFailed",
    "annotation_records",
    "corpus_from_documents",
    "load_corpus",
    "pack",
    "run_corpus",
    "view_counts",
    "write_annotations_jsonl",
    "write_corpus_jsonl",
]
