"""
Regex engine - pattern parser, Thompson NFA and a lazily built DFA.

Supported syntax: literals and escapes, character classes ([a-z], [^...],
\\d \\w \\s and their negations), ``.`` (any character except newline),
grouping with ``(...)`` / ``(?:...)``, alternation and the quantifiers
``* + ? {m} {m,} {m,n}``. Anchors, backreferences and lazy quantifiers are
rejected.

Matching never backtracks. The reference scan restarts the automaton at each
candidate start; ``StreamingRegexScanner`` runs all candidate starts in
parallel over a single pass of the character stream.
"""

import threading
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from ..exceptions import RegexSyntaxError, RegexTooComplexError

MAX_CODE_POINT = 0x10FFFF
REPEAT_LIMIT = 1000
DEAD = -1

Ranges = Tuple[Tuple[int, int], ...]


def _normalize(ranges: Sequence[Tuple[int, int]]) -> Ranges:
    merged: List[List[int]] = []
    for lo, hi in sorted(ranges):
        if merged and lo <= merged[-1][1] + 1:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


def _complement(ranges: Ranges) -> Ranges:
    result = []
    cursor = 0
    for lo, hi in ranges:
        if lo > cursor:
            result.append((cursor, lo - 1))
        cursor = hi + 1
    if cursor <= MAX_CODE_POINT:
        result.append((cursor, MAX_CODE_POINT))
    return tuple(result)


def _chars(text: str) -> Ranges:
    return _normalize([(ord(c), ord(c)) for c in text])


DIGIT = _chars("0123456789")
WORD = _normalize([(ord("a"), ord("z")), (ord("A"), ord("Z")), (ord("0"), ord("9")), (ord("_"), ord("_"))])
SPACE = _chars(" \t\n\r\f\v")
DOT = _complement(_chars("\n"))

CLASS_ESCAPES: Dict[str, Ranges] = {
    "d": DIGIT,
    "D": _complement(DIGIT),
    "w": WORD,
    "W": _complement(WORD),
    "s": SPACE,
    "S": _complement(SPACE),
}
CONTROL_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "f": "\f", "v": "\v"}


# Syntax tree

@dataclass(frozen=True)
class CharSet:
    ranges: Ranges


@dataclass(frozen=True)
class Concat:
    items: Tuple["RegexNode", ...]


@dataclass(frozen=True)
class Alternation:
    options: Tuple["RegexNode", ...]


@dataclass(frozen=True)
class Repeat:
    item: "RegexNode"
    min: int
    max: Optional[int]  # None = unbounded


RegexNode = Union[CharSet, Concat, Alternation, Repeat]


class RegexParser:
    """Recursive-descent parser producing a RegexNode tree."""

    def __init__(self, pattern: str):
        self.pattern = pattern
        self.pos = 0

    def parse(self) -> RegexNode:
        node = self._alternation()
        if self.pos < len(self.pattern):
            self._fail("unbalanced parenthesis")
        return node

    def _fail(self, message: str):
        raise RegexSyntaxError(self.pattern, self.pos, message)

    def _peek(self) -> Optional[str]:
        return self.pattern[self.pos] if self.pos < len(self.pattern) else None

    def _take(self) -> str:
        if self.pos >= len(self.pattern):
            self._fail("unexpected end of pattern")
        ch = self.pattern[self.pos]
        self.pos += 1
        return ch

    def _alternation(self) -> RegexNode:
        options = [self._concat()]
        while self._peek() == "|":
            self.pos += 1
            options.append(self._concat())
        return options[0] if len(options) == 1 else Alternation(tuple(options))

    def _concat(self) -> RegexNode:
        items = []
        while self._peek() not in (None, "|", ")"):
            items.append(self._repeat())
        return items[0] if len(items) == 1 else Concat(tuple(items))

    def _repeat(self) -> RegexNode:
        if self._peek() in ("*", "+", "?"):
            self._fail("nothing to repeat")
        item = self._atom()
        bounds = self._quantifier()
        if bounds is None:
            return item
        if self._peek() in ("*", "+", "?") or self._brace_quantifier_ahead():
            self._fail("multiple repeat (lazy and possessive quantifiers are not supported)")
        return Repeat(item, *bounds)

    def _brace_quantifier_ahead(self) -> bool:
        if self._peek() != "{":
            return False
        end = self.pattern.find("}", self.pos)
        if end < 0:
            return False
        body = self.pattern[self.pos + 1:end]
        low, _, high = body.partition(",")
        return low.isdigit() and (high == "" or high.isdigit())

    def _quantifier(self) -> Optional[Tuple[int, Optional[int]]]:
        ch = self._peek()
        if ch == "*":
            self.pos += 1
            return 0, None
        if ch == "+":
            self.pos += 1
            return 1, None
        if ch == "?":
            self.pos += 1
            return 0, 1
        if not self._brace_quantifier_ahead():
            return None
        end = self.pattern.index("}", self.pos)
        body = self.pattern[self.pos + 1:end]
        low, comma, high = body.partition(",")
        minimum = int(low)
        maximum = int(high) if high else (None if comma else minimum)
        if maximum is not None and maximum < minimum:
            self._fail(f"bad repeat interval {{{body}}}")
        if minimum > REPEAT_LIMIT or (maximum or 0) > REPEAT_LIMIT:
            self._fail(f"repeat count above {REPEAT_LIMIT}")
        self.pos = end + 1
        return minimum, maximum

    def _atom(self) -> RegexNode:
        ch = self._take()
        if ch == "(":
            if self.pattern.startswith("?:", self.pos):
                self.pos += 2
            elif self._peek() == "?":
                self._fail("unsupported group extension")
            node = self._alternation()
            if self._peek() != ")":
                self._fail("missing )")
            self.pos += 1
            return node
        if ch == ")":
            self._fail("unbalanced parenthesis")
        if ch == "[":
            return CharSet(self._class())
        if ch == ".":
            return CharSet(DOT)
        if ch in "^$":
            self.pos -= 1
            self._fail("anchors are not supported")
        if ch == "\\":
            return CharSet(self._escape(in_class=False))
        return CharSet(_chars(ch))

    def _escape(self, in_class: bool) -> Ranges:
        ch = self._take()
        if ch in CLASS_ESCAPES:
            return CLASS_ESCAPES[ch]
        if ch in CONTROL_ESCAPES:
            return _chars(CONTROL_ESCAPES[ch])
        if ch.isdigit():
            self._fail("backreferences are not supported")
        if ch == "b" and not in_class or ch in "AZzB":
            self._fail("anchors are not supported")
        if ch.isalnum():
            self._fail(f"bad escape \\{ch}")
        return _chars(ch)

    def _class_char(self) -> Union[int, Ranges]:
        ch = self._take()
        if ch == "\\":
            ranges = self._escape(in_class=True)
            if len(ranges) == 1 and ranges[0][0] == ranges[0][1]:
                return ranges[0][0]
            return ranges
        return ord(ch)

    def _class(self) -> Ranges:
        negate = self._peek() == "^"
        if negate:
            self.pos += 1
        ranges: List[Tuple[int, int]] = []
        first = True
        while True:
            if self._peek() is None:
                self._fail("unterminated character class")
            if self._peek() == "]" and not first:
                self.pos += 1
                break
            first = False
            low = self._class_char()
            if isinstance(low, tuple):
                ranges.extend(low)
                continue
            if self._peek() == "-" and self.pos + 1 < len(self.pattern) and self.pattern[self.pos + 1] != "]":
                self.pos += 1
                high = self._class_char()
                if isinstance(high, tuple) or high < low:
                    self._fail("bad character range")
                ranges.append((low, high))
            else:
                ranges.append((low, low))
        normalized = _normalize(ranges)
        return _complement(normalized) if negate else normalized


# Thompson NFA

@dataclass
class NfaState:
    epsilon: List[int] = field(default_factory=list)
    edges: List[Tuple[Ranges, int]] = field(default_factory=list)


class NfaBuilder:
    def __init__(self):
        self.states: List[NfaState] = []

    def new_state(self) -> int:
        self.states.append(NfaState())
        return len(self.states) - 1

    def build(self, node: RegexNode) -> Tuple[int, int]:
        """Fragment (start, accept) for the node."""
        if isinstance(node, CharSet):
            start, accept = self.new_state(), self.new_state()
            if node.ranges:
                self.states[start].edges.append((node.ranges, accept))
            return start, accept
        if isinstance(node, Concat):
            start = current = self.new_state()
            for item in node.items:
                item_start, item_accept = self.build(item)
                self.states[current].epsilon.append(item_start)
                current = item_accept
            return start, current
        if isinstance(node, Alternation):
            start, accept = self.new_state(), self.new_state()
            for option in node.options:
                option_start, option_accept = self.build(option)
                self.states[start].epsilon.append(option_start)
                self.states[option_accept].epsilon.append(accept)
            return start, accept
        return self._repeat(node)

    def _repeat(self, node: Repeat) -> Tuple[int, int]:
        start = current = self.new_state()
        for _ in range(node.min):
            item_start, item_accept = self.build(node.item)
            self.states[current].epsilon.append(item_start)
            current = item_accept
        if node.max is None:
            loop_start, loop_accept = self.build(node.item)
            accept = self.new_state()
            self.states[current].epsilon.extend([loop_start, accept])
            self.states[loop_accept].epsilon.extend([loop_start, accept])
            return start, accept
        accept = self.new_state()
        for _ in range(node.max - node.min):
            item_start, item_accept = self.build(node.item)
            self.states[current].epsilon.extend([item_start, accept])
            current = item_accept
        self.states[current].epsilon.append(accept)
        return start, accept


# Lazily determinized automaton

class CompiledRegex:
    """DFA over an alphabet partitioned into atoms (maximal code-point ranges
    that no character class distinguishes). States are built on demand and
    cached; the cache is shared across threads."""

    def __init__(self, pattern: str):
        self.pattern = pattern
        tree = RegexParser(pattern).parse()
        builder = NfaBuilder()
        self._nfa_start, self._nfa_accept = builder.build(tree)
        self._nfa = builder.states

        cuts = {0, MAX_CODE_POINT + 1}
        for state in self._nfa:
            for ranges, _ in state.edges:
                for lo, hi in ranges:
                    cuts.update((lo, hi + 1))
        self._boundaries = sorted(cuts)
        self.atom_count = len(self._boundaries) - 1
        self._edge_atoms = [
            [(self._atoms_of(ranges), target) for ranges, target in state.edges]
            for state in self._nfa
        ]

        self._lock = threading.Lock()
        self._sets: List[FrozenSet[int]] = []
        self._index: Dict[FrozenSet[int], int] = {}
        self._accepting: List[bool] = []
        self._transitions: Dict[Tuple[int, int], int] = {}
        self.start = self._intern(self._closure({self._nfa_start}))

    def _atoms_of(self, ranges: Ranges) -> FrozenSet[int]:
        atoms = set()
        for lo, hi in ranges:
            first = bisect_right(self._boundaries, lo) - 1
            last = bisect_right(self._boundaries, hi) - 1
            atoms.update(range(first, last + 1))
        return frozenset(atoms)

    def _closure(self, states) -> FrozenSet[int]:
        stack = list(states)
        seen = set(stack)
        while stack:
            for target in self._nfa[stack.pop()].epsilon:
                if target not in seen:
                    seen.add(target)
                    stack.append(target)
        return frozenset(seen)

    def _intern(self, states: FrozenSet[int]) -> int:
        if not states:
            return DEAD
        index = self._index.get(states)
        if index is None:
            index = len(self._sets)
            self._sets.append(states)
            self._accepting.append(self._nfa_accept in states)
            self._index[states] = index
        return index

    def atom(self, ch: str) -> int:
        return bisect_right(self._boundaries, ord(ch)) - 1

    def is_accepting(self, state: int) -> bool:
        return state != DEAD and self._accepting[state]

    def step_atom(self, state: int, atom: int) -> int:
        if state == DEAD:
            return DEAD
        key = (state, atom)
        target = self._transitions.get(key)
        if target is None:
            with self._lock:
                target = self._transitions.get(key)
                if target is None:
                    moved = {t for s in self._sets[state] for atoms, t in self._edge_atoms[s] if atom in atoms}
                    target = self._intern(self._closure(moved))
                    self._transitions[key] = target
        return target

    def step(self, state: int, ch: str) -> int:
        return self.step_atom(state, self.atom(ch))

    def explore(self, limit: int) -> int:
        """Determinize eagerly; stop as soon as more than ``limit`` states exist."""
        frontier = [self.start]
        seen = {self.start}
        while frontier:
            state = frontier.pop()
            for atom in range(self.atom_count):
                target = self.step_atom(state, atom)
                if target != DEAD and target not in seen:
                    seen.add(target)
                    if len(seen) > limit:
                        return len(seen)
                    frontier.append(target)
        return len(seen)

    def longest_match(self, text: str, start: int) -> Optional[int]:
        """End of the longest non-empty match beginning at ``start``."""
        state = self.start
        best = None
        for pos in range(start, len(text)):
            state = self.step(state, text[pos])
            if state == DEAD:
                break
            if self._accepting[state]:
                best = pos + 1
        return best

    def fullmatch(self, text: str) -> bool:
        state = self.start
        for ch in text:
            state = self.step(state, ch)
            if state == DEAD:
                return False
        return self.is_accepting(state)


@lru_cache(maxsize=512)
def compile_regex(pattern: str) -> CompiledRegex:
    return CompiledRegex(pattern)


def dfa_state_count(pattern: str, limit: int) -> int:
    """Number of reachable DFA states, saturating just above ``limit``."""
    return CompiledRegex(pattern).explore(limit)


def check_state_budget(pattern: str, budget: int) -> int:
    count = dfa_state_count(pattern, budget)
    if count > budget:
        raise RegexTooComplexError(pattern, budget)
    return count


def find_matches(pattern: str, text: str) -> List[Tuple[int, int]]:
    """Leftmost-longest, non-overlapping, non-empty matches scanning left to right."""
    regex = compile_regex(pattern)
    spans = []
    pos = 0
    while pos < len(text):
        end = regex.longest_match(text, pos)
        if end is None:
            pos += 1
        else:
            spans.append((pos, end))
            pos = end
    return spans


@dataclass
class _Candidate:
    start: int
    state: int
    best: Optional[int] = None


class StreamingRegexScanner:
    """Single-pass matcher: every character is fed exactly once.

    Candidates for every admissible start run side by side; a match is
    emitted as soon as the leftmost live candidate can no longer extend.
    Candidates that reach the same automaton state are merged when the
    later one cannot change the outcome.
    """

    def __init__(self, regex: CompiledRegex):
        self.regex = regex
        self.candidates: List[_Candidate] = []
        self.floor = 0
        self.position = 0

    def feed(self, ch: str) -> List[Tuple[int, int]]:
        pos = self.position
        self.position += 1
        regex = self.regex
        if pos >= self.floor:
            self.candidates.append(_Candidate(pos, regex.start))

        atom = regex.atom(ch)
        merged: Dict[int, _Candidate] = {}
        survivors = []
        for candidate in self.candidates:
            if candidate.state != DEAD:
                candidate.state = regex.step_atom(candidate.state, atom)
                if regex.is_accepting(candidate.state):
                    candidate.best = pos + 1
            if candidate.state == DEAD and candidate.best is None:
                continue
            if candidate.state != DEAD:
                earlier = merged.get(candidate.state)
                if (
                    earlier is not None
                    and (earlier.best is not None or candidate.best is None)
                    and not self._separated(survivors, earlier.start, candidate.start)
                ):
                    continue
                merged.setdefault(candidate.state, candidate)
            survivors.append(candidate)
        self.candidates = survivors
        return self._emit(final=False)

    @staticmethod
    def _separated(survivors: List[_Candidate], earlier: int, later: int) -> bool:
        """True when a recorded match end could cut between the two starts."""
        return any(c.best is not None and earlier < c.best <= later for c in survivors)

    def finish(self) -> List[Tuple[int, int]]:
        return self._emit(final=True)

    def _emit(self, final: bool) -> List[Tuple[int, int]]:
        spans = []
        while self.candidates:
            head = self.candidates[0]
            if head.state != DEAD and not final:
                break
            if head.best is None:
                self.candidates.pop(0)
                continue
            spans.append((head.start, head.best))
            self.floor = head.best
            self.candidates = [c for c in self.candidates if c.start >= self.floor]
        return spans
