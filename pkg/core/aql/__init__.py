"""Rule-language front-end: parsing, name resolution and lowering to an operator graph."""

from pathlib import Path
from typing import Optional

from ..models.graph import OperatorGraph
from .lowering import lower_to_aog, optimize
from .parser import parse_aql
from .program import RuleProgram, ViewDefinition


def compile_aql(source: str, base_dir: Optional[Path] = None) -> OperatorGraph:
    """Parse, resolve and lower a rule program in one step."""
    return lower_to_aog(parse_aql(source, base_dir))


__all__ = ["RuleProgram", "ViewDefinition", "compile_aql", "lower_to_aog", "optimize", "parse_aql"]
