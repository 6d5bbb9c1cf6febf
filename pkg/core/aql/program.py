"""
Rule program model - the parsed, name-resolved form of a query.

Predicates inside view bodies reference columns as ``alias.column``; lowering
maps those references onto the operator graph's column names.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from ..models.predicates import Predicate


@dataclass(frozen=True)
class Position:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class ExtractRegex:
    pattern: str
    column: str = "match"
    inputs: Tuple[str, ...] = ()


@dataclass(frozen=True)
class ExtractDictionary:
    dictionary: str
    column: str = "match"
    inputs: Tuple[str, ...] = ()


@dataclass(frozen=True)
class SelectBody:
    predicate: Predicate
    input: str
    alias: str

    @property
    def inputs(self) -> Tuple[str, ...]:
        return (self.input,)


@dataclass(frozen=True)
class ProjectBody:
    columns: Optional[Tuple[str, ...]]  # None for "select *"
    input: str
    alias: str

    @property
    def inputs(self) -> Tuple[str, ...]:
        return (self.input,)


@dataclass(frozen=True)
class JoinBody:
    predicate: Predicate
    left: str
    left_alias: str
    right: str
    right_alias: str

    @property
    def inputs(self) -> Tuple[str, ...]:
        return (self.left, self.right)


@dataclass(frozen=True)
class UnionAllBody:
    views: Tuple[str, ...]

    @property
    def inputs(self) -> Tuple[str, ...]:
        return self.views


@dataclass(frozen=True)
class ConsolidateBody:
    input: str
    policy: str = "contained_within"

    @property
    def inputs(self) -> Tuple[str, ...]:
        return (self.input,)


ViewBody = Union[
    ExtractRegex, ExtractDictionary, SelectBody, ProjectBody, JoinBody, UnionAllBody, ConsolidateBody
]


@dataclass(frozen=True)
class CreateDictionary:
    name: str
    entries: Optional[Tuple[str, ...]]
    file: Optional[str]
    position: Position


@dataclass(frozen=True)
class ViewDefinition:
    name: str
    body: ViewBody
    position: Position


@dataclass(frozen=True)
class OutputView:
    name: str
    position: Position


Statement = Union[CreateDictionary, ViewDefinition, OutputView]


@dataclass(frozen=True)
class RuleProgram:
    statements: Tuple[Statement, ...]
    base_dir: Optional[Path] = None  # where dictionary files are resolved

    @property
    def views(self) -> List[ViewDefinition]:
        return [s for s in self.statements if isinstance(s, ViewDefinition)]

    @property
    def dictionaries(self) -> Dict[str, CreateDictionary]:
        return {s.name: s for s in self.statements if isinstance(s, CreateDictionary)}

    @property
    def outputs(self) -> List[str]:
        return [s.name for s in self.statements if isinstance(s, OutputView)]

    def view(self, name: str) -> ViewDefinition:
        for view in self.views:
            if view.name == name:
                return view
        raise KeyError(name)
