"""
Dictionary (gazetteer) matching.

Entries match case-insensitively under simple per-character case folding,
so offsets in the folded text equal offsets in the original. A match must
start and end on token boundaries: tokens are maximal alphanumeric runs and
single non-alphanumeric characters, so a boundary is any position that does
not split an alphanumeric run.
"""

import heapq
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Deque, Dict, Iterable, List, Optional, Tuple

import ahocorasick

from ..exceptions import OperatorError, UserInputError


def fold_char(ch: str) -> str:
    lowered = ch.lower()
    return lowered if len(lowered) == 1 else ch


def fold(text: str) -> str:
    return "".join(fold_char(ch) for ch in text)


def is_boundary(text: str, position: int) -> bool:
    if position <= 0 or position >= len(text):
        return True
    return not (text[position - 1].isalnum() and text[position].isalnum())


@dataclass(frozen=True)
class Dictionary:
    name: str
    entries: Tuple[str, ...]  # folded, deduplicated, sorted

    @classmethod
    def from_entries(cls, name: str, entries: Iterable[str]) -> "Dictionary":
        folded = set()
        for entry in entries:
            if not isinstance(entry, str) or not entry:
                raise OperatorError(f"dictionary {name!r} contains an empty entry")
            folded.add(fold(entry))
        return cls(name, tuple(sorted(folded)))

    @classmethod
    def from_file(cls, name: str, path: Path) -> "Dictionary":
        """Newline-delimited entries; blank lines are skipped."""
        try:
            lines = Path(path).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise UserInputError(f"cannot read dictionary file {path}: {exc}")
        return cls.from_entries(name, (line.strip() for line in lines if line.strip()))

    @property
    def max_length(self) -> int:
        return max((len(e) for e in self.entries), default=0)


@lru_cache(maxsize=128)
def _automaton_for(entries: Tuple[str, ...]) -> "ahocorasick.Automaton":
    automaton = ahocorasick.Automaton()
    for entry in entries:
        automaton.add_word(entry, len(entry))
    automaton.make_automaton()
    return automaton


def _automaton(dictionary: Dictionary) -> Optional["ahocorasick.Automaton"]:
    if not dictionary.entries:
        return None
    return _automaton_for(dictionary.entries)


def find_entries(dictionary: Dictionary, text: str) -> List[Tuple[int, int]]:
    """Every token-aligned occurrence of every entry, sorted by (begin, end)."""
    automaton = _automaton(dictionary)
    if automaton is None or not text:
        return []
    spans = []
    for last, length in automaton.iter(fold(text)):
        begin, end = last + 1 - length, last + 1
        if is_boundary(text, begin) and is_boundary(text, end):
            spans.append((begin, end))
    spans.sort()
    return spans


@dataclass
class _TrieNode:
    children: Dict[str, "_TrieNode"] = field(default_factory=dict)
    fail: Optional["_TrieNode"] = None
    lengths: List[int] = field(default_factory=list)


class StreamingDictionaryScanner:
    """Single-pass trie scanner for the character stream.

    Boundary checks at a match end need one character of lookahead, and
    matches are found in end order, so results pass through a reorder window
    of ``max_length`` characters before they are emitted in (begin, end)
    order.
    """

    def __init__(self, dictionary: Dictionary):
        self.dictionary = dictionary
        self.window = dictionary.max_length
        self.root = _TrieNode()
        for entry in dictionary.entries:
            node = self.root
            for ch in entry:
                node = node.children.setdefault(ch, _TrieNode())
            node.lengths.append(len(entry))
        self._link()
        self.node = self.root
        self.position = 0
        self._alnum: Deque[bool] = deque(maxlen=self.window + 2)
        self._awaiting_end: List[Tuple[int, int]] = []
        self._held: List[Tuple[int, int]] = []

    def _link(self) -> None:
        root = self.root
        root.fail = root
        queue = deque()
        for child in root.children.values():
            child.fail = root
            queue.append(child)
        while queue:
            current = queue.popleft()
            for ch, child in current.children.items():
                fallback = current.fail
                while fallback is not root and ch not in fallback.children:
                    fallback = fallback.fail
                target = fallback.children.get(ch, root)
                child.fail = root if target is child else target
                child.lengths = child.lengths + child.fail.lengths
                queue.append(child)

    def _boundary_before(self, begin: int) -> bool:
        """Boundary at ``begin`` given the alnum flags of the characters seen so far."""
        if begin == 0:
            return True
        # self._alnum[-1] is the flag of the character at self.position - 1
        offset = self.position - begin
        return not (self._alnum[-1 - offset] and self._alnum[-offset])

    def feed(self, ch: str) -> List[Tuple[int, int]]:
        alnum = ch.isalnum()
        # Matches ending here are confirmed now that the next character is known.
        for begin, end in self._awaiting_end:
            if not (self._alnum[-1] and alnum):
                heapq.heappush(self._held, (begin, end))
        self._awaiting_end = []

        self._alnum.append(alnum)
        pos = self.position
        self.position += 1

        folded = fold_char(ch)
        node = self.node
        while node is not self.root and folded not in node.children:
            node = node.fail
        self.node = node = node.children.get(folded, self.root)
        for length in node.lengths:
            begin = pos + 1 - length
            if self._boundary_before(begin):
                self._awaiting_end.append((begin, pos + 1))
        return self._release(self.position + 1 - self.window)

    def finish(self) -> List[Tuple[int, int]]:
        for span in self._awaiting_end:
            heapq.heappush(self._held, span)
        self._awaiting_end = []
        return self._release(None)

    def _release(self, below: Optional[int]) -> List[Tuple[int, int]]:
        """Pop held matches whose begin precedes every possible future match."""
        spans = []
        while self._held and (below is None or self._held[0][0] < below):
            spans.append(heapq.heappop(self._held))
        return spans
