"""Reference (software) operator semantics."""

from .dictionary import Dictionary, find_entries
from .executor import (
    GraphExecutor,
    dictionary_extract,
    execute_graph_software,
    execute_subgraph_software,
    regex_extract,
)
from .regex import check_state_budget, compile_regex, find_matches
from .relational import consolidate, project, select, span_join, union_all

__all__ = [
    "Dictionary",
    "GraphExecutor",
    "check_state_budget",
    "compile_regex",
    "consolidate",
    "dictionary_extract",
    "execute_graph_software",
    "execute_subgraph_software",
    "find_entries",
    "find_matches",
    "project",
    "regex_extract",
    "select",
    "span_join",
    "union_all",
]
