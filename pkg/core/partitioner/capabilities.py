"""
Accelerator capabilities and operator classification.

A CapabilitySet names the operator kinds the accelerator library provides and
the per-kind limits that decide whether a concrete node fits.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional

from loguru import logger
from pydantic import BaseModel, Field, ValidationError, field_validator

from ..exceptions import ConfigError, RegexSyntaxError, RegexTooComplexError
from ..models.graph import EXTRACTION_KINDS, OperatorGraph, OperatorKind, OperatorNode
from ..models.predicates import MatchesRegex, Predicate, predicate_from_json
from ..operators.regex import check_state_budget

DEFAULT_STATE_BUDGET = 256

NEVER_ACCELERABLE = frozenset({OperatorKind.DOC_SOURCE, OperatorKind.SINK, OperatorKind.SUBGRAPH_CALL})


@dataclass(frozen=True)
class CapabilitySet:
    name: str
    kinds: FrozenSet[OperatorKind]
    regex_state_budget: int = DEFAULT_STATE_BUDGET
    limits: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.kinds & NEVER_ACCELERABLE:
            bad = sorted(k.value for k in self.kinds & NEVER_ACCELERABLE)
            raise ConfigError(f"capability set {self.name!r} lists never-accelerable kinds {bad}")
        if self.regex_state_budget < 1:
            raise ConfigError("regex state budget must be positive")

    def with_budget(self, budget: int) -> "CapabilitySet":
        return CapabilitySet(self.name, self.kinds, budget, dict(self.limits))

    def to_dict(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "kinds": sorted(k.value for k in self.kinds),
            "regex_state_budget": self.regex_state_budget,
        }


PRESETS: Dict[str, FrozenSet[OperatorKind]] = {
    # consolidation stays on the host with the stock operator library
    "default": frozenset(EXTRACTION_KINDS | {
        OperatorKind.SELECT, OperatorKind.PROJECT, OperatorKind.JOIN, OperatorKind.UNION,
    }),
    "extraction-only": frozenset(EXTRACTION_KINDS),
    "all": frozenset(EXTRACTION_KINDS | {
        OperatorKind.SELECT, OperatorKind.PROJECT, OperatorKind.JOIN, OperatorKind.UNION,
        OperatorKind.CONSOLIDATE,
    }),
}


class CapabilityDocument(BaseModel):
    """Custom capability file layout."""
    name: str = "custom"
    kinds: List[str]
    regex_state_budget: int = Field(default=DEFAULT_STATE_BUDGET, ge=1)

    @field_validator("kinds")
    @classmethod
    def known_kinds(cls, value: List[str]) -> List[str]:
        for kind in value:
            OperatorKind(kind)
        return value


def load_capabilities(spec: str, regex_state_budget: Optional[int] = None) -> CapabilitySet:
    """Preset name (default, extraction-only, all) or path to a JSON capability file."""
    if spec in PRESETS:
        caps = CapabilitySet(spec, PRESETS[spec])
    else:
        path = Path(spec)
        if not path.is_file():
            raise ConfigError(f"unknown capability preset or file: {spec}")
        try:
            doc = CapabilityDocument.model_validate(json.loads(path.read_text(encoding="utf-8")))
        except (ValueError, ValidationError) as exc:
            raise ConfigError(f"bad capability file {spec}: {exc}")
        caps = CapabilitySet(doc.name, frozenset(OperatorKind(k) for k in doc.kinds), doc.regex_state_budget)
    if regex_state_budget is not None:
        caps = caps.with_budget(regex_state_budget)
    return caps


def _regex_patterns(predicate: Predicate) -> List[str]:
    if isinstance(predicate, MatchesRegex):
        return [predicate.pattern]
    return [p for child in vars(predicate).values() if isinstance(child, Predicate) for p in _regex_patterns(child)]


def node_patterns(node: OperatorNode) -> List[str]:
    """Every regex a node would compile into an automaton."""
    if node.kind == OperatorKind.REGEX_EXTRACT:
        return [node.params["pattern"]]
    if node.kind in (OperatorKind.SELECT, OperatorKind.JOIN):
        return _regex_patterns(predicate_from_json(node.params["predicate"]))
    return []


def is_accelerable(node: OperatorNode, caps: CapabilitySet) -> bool:
    if node.kind in NEVER_ACCELERABLE or node.kind not in caps.kinds:
        return False
    for pattern in node_patterns(node):
        try:
            check_state_budget(pattern, caps.regex_state_budget)
        except (RegexTooComplexError, RegexSyntaxError) as exc:
            logger.debug(f"{node.label} stays on the host: {exc}")
            return False
    return True


def classify(graph: OperatorGraph, caps: CapabilitySet) -> Dict[int, bool]:
    """Accelerable flag for every node."""
    return {node_id: is_accelerable(graph.nodes[node_id], caps) for node_id in graph.node_ids}
