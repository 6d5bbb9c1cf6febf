"""
Rule-language parser.

Grammar (keywords are case-insensitive)::

    program      := statement*
    statement    := dictionary | view | output
    dictionary   := 'create' 'dictionary' NAME ( 'as' '(' STRING (',' STRING)* ')'
                                               | 'from' 'file' STRING ) ';'
    view         := 'create' 'view' NAME 'as' body ';'
    body         := extract | select | union | consolidate
    extract      := 'extract' ( 'regex' REGEX | 'dictionary' NAME )
                    'on' ALIAS '.' 'text' [ 'as' NAME ] 'from' 'Document' ALIAS
    select       := 'select' ( '*' | ref (',' ref)* ) 'from' NAME ALIAS [',' NAME ALIAS]
                    [ 'where' predicate ]
    union        := '(' select ')' ( 'union' 'all' '(' select ')' )+
    consolidate  := 'consolidate' NAME [ 'using' STRING ]
    output       := 'output' 'view' NAME ';'
    predicate    := term ( 'or' term )*
    term         := factor ( 'and' factor )*
    factor       := 'not' factor | '(' predicate ')' | FUNC '(' args ')'
    ref          := ALIAS '.' NAME

A single-source select with a column list is a projection, with a where
clause a selection; two sources with a where clause form a join.
"""

from pathlib import Path
from typing import Callable, Dict, List, Optional, Set, Tuple

from loguru import logger

from ..exceptions import AqlResolutionError, AqlSyntaxError, RegexSyntaxError
from ..models.predicates import (
    And,
    Contains,
    Follows,
    MatchesRegex,
    Not,
    Or,
    Overlaps,
    Predicate,
    SpanLengthGreaterThan,
)
from ..operators.regex import RegexParser
from .lexer import Token, TokenType, tokenize
from .program import (
    ConsolidateBody,
    CreateDictionary,
    ExtractDictionary,
    ExtractRegex,
    JoinBody,
    OutputView,
    Position,
    ProjectBody,
    RuleProgram,
    SelectBody,
    Statement,
    UnionAllBody,
    ViewBody,
    ViewDefinition,
)

DOCUMENT_VIEW = "Document"
DOCUMENT_COLUMN = "text"

CONSOLIDATION_POLICIES = {"containedwithin": "contained_within", "contained_within": "contained_within"}


class _Source:
    """A `NAME ALIAS` item of a from clause, remembered with its position."""

    def __init__(self, view: str, alias: str, token: Token):
        self.view = view
        self.alias = alias
        self.token = token


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.index = 0
        # (view name, token) pairs to resolve once every definition is known
        self.view_refs: List[Tuple[str, Token]] = []
        self.dictionary_refs: List[Tuple[str, Token]] = []

    # token helpers

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _error(self, message: str, token: Optional[Token] = None):
        token = token or self.current
        raise AqlSyntaxError(message, token.line, token.column)

    def _next(self) -> Token:
        token = self.current
        if token.type != TokenType.EOF:
            self.index += 1
        return token

    def _expect(self, kind: TokenType, what: Optional[str] = None) -> Token:
        if self.current.type != kind:
            self._error(f"expected {what or kind.value}, found {self.current.describe()}")
        return self._next()

    def _keyword(self, word: str) -> Token:
        if not self.current.is_keyword(word):
            self._error(f"expected '{word}', found {self.current.describe()}")
        return self._next()

    def _accept_keyword(self, word: str) -> bool:
        if self.current.is_keyword(word):
            self._next()
            return True
        return False

    def _name(self, what: str) -> Token:
        return self._expect(TokenType.IDENT, what)

    # statements

    def parse_statements(self) -> List[Statement]:
        statements: List[Statement] = []
        while self.current.type != TokenType.EOF:
            token = self.current
            if token.is_keyword("create"):
                self._next()
                if self.current.is_keyword("dictionary"):
                    statements.append(self._dictionary(token))
                elif self.current.is_keyword("view"):
                    statements.append(self._view(token))
                else:
                    self._error(f"expected 'dictionary' or 'view', found {self.current.describe()}")
            elif token.is_keyword("output"):
                self._next()
                self._keyword("view")
                name = self._name("view name")
                self.view_refs.append((name.value, name))
                statements.append(OutputView(name.value, Position(token.line, token.column)))
            else:
                self._error(f"expected a statement, found {token.describe()}")
            self._expect(TokenType.SEMI)
        return statements

    def _dictionary(self, start: Token) -> CreateDictionary:
        self._keyword("dictionary")
        name = self._name("dictionary name").value
        position = Position(start.line, start.column)
        if self._accept_keyword("from"):
            self._keyword("file")
            path = self._expect(TokenType.STRING, "file path")
            return CreateDictionary(name, None, path.value, position)
        self._keyword("as")
        self._expect(TokenType.LPAREN)
        entries = [self._expect(TokenType.STRING, "dictionary entry")]
        while self.current.type == TokenType.COMMA:
            self._next()
            entries.append(self._expect(TokenType.STRING, "dictionary entry"))
        self._expect(TokenType.RPAREN)
        for entry in entries:
            if not entry.value:
                self._error("empty dictionary entry", entry)
        return CreateDictionary(name, tuple(e.value for e in entries), None, position)

    def _view(self, start: Token) -> ViewDefinition:
        self._keyword("view")
        name = self._name("view name").value
        self._keyword("as")
        body = self._body()
        return ViewDefinition(name, body, Position(start.line, start.column))

    def _body(self) -> ViewBody:
        token = self.current
        if token.is_keyword("extract"):
            return self._extract()
        if token.is_keyword("select"):
            return self._select()
        if token.type == TokenType.LPAREN:
            return self._union()
        if token.is_keyword("consolidate"):
            self._next()
            source = self._name("view name")
            self.view_refs.append((source.value, source))
            policy = "contained_within"
            if self._accept_keyword("using"):
                policy_token = self._expect(TokenType.STRING, "consolidation policy")
                policy = CONSOLIDATION_POLICIES.get(policy_token.value.lower())
                if policy is None:
                    self._error(f"unsupported consolidation policy '{policy_token.value}'", policy_token)
            return ConsolidateBody(source.value, policy)
        self._error(f"expected extract, select, union or consolidate, found {token.describe()}")

    def _extract(self) -> ViewBody:
        self._keyword("extract")
        if self._accept_keyword("regex"):
            pattern_token = self._expect(TokenType.REGEX, "/regex/")
            self._check_regex(pattern_token)
            make: Callable[[str], ViewBody] = lambda column: ExtractRegex(pattern_token.value, column)
        elif self._accept_keyword("dictionary"):
            dictionary = self._name("dictionary name")
            self.dictionary_refs.append((dictionary.value, dictionary))
            make = lambda column: ExtractDictionary(dictionary.value, column)
        else:
            self._error(f"expected 'regex' or 'dictionary', found {self.current.describe()}")
        self._keyword("on")
        alias = self._name("alias")
        self._expect(TokenType.DOT)
        column = self._expect(TokenType.IDENT, "column")
        column_name = "match"
        if self._accept_keyword("as"):
            column_name = self._name("output column name").value
        self._keyword("from")
        source = self._name("Document")
        if source.value != DOCUMENT_VIEW:
            self._error(f"extraction reads the Document view, not {source.value!r}", source)
        source_alias = self._name("alias")
        if alias.value != source_alias.value:
            self._error(f"unknown alias {alias.value!r}", alias)
        if column.value != DOCUMENT_COLUMN:
            self._error(f"Document has no column {column.value!r}", column)
        return make(column_name)

    def _check_regex(self, token: Token) -> None:
        try:
            RegexParser(token.value).parse()
        except RegexSyntaxError as exc:
            self._error(f"invalid regex /{token.value}/: {exc}", token)

    def _source(self) -> _Source:
        view = self._name("view name")
        if view.value == DOCUMENT_VIEW:
            self._error("Document can only be read by extract statements", view)
        alias = self._name("alias")
        self.view_refs.append((view.value, view))
        return _Source(view.value, alias.value, view)

    def _ref(self) -> str:
        alias = self._name("alias")
        self._expect(TokenType.DOT)
        column = self._name("column")
        return f"{alias.value}.{column.value}"

    def _select(self) -> ViewBody:
        start = self._keyword("select")
        columns: Optional[List[str]] = None
        if self.current.type == TokenType.STAR:
            self._next()
        else:
            columns = [self._ref()]
            while self.current.type == TokenType.COMMA:
                self._next()
                columns.append(self._ref())
        self._keyword("from")
        sources = [self._source()]
        if self.current.type == TokenType.COMMA:
            self._next()
            sources.append(self._source())
        predicate = self._predicate() if self._accept_keyword("where") else None
        aliases = {s.alias for s in sources}
        if len(aliases) != len(sources):
            self._error(f"duplicate alias {sources[0].alias!r}", sources[1].token)
        if predicate is not None:
            self._check_aliases(predicate.columns(), aliases, start)
        if columns is not None:
            self._check_aliases(set(columns), aliases, start)

        if len(sources) == 2:
            if columns is not None:
                self._error("a join cannot also project; select the columns in a separate view", start)
            if predicate is None:
                self._error("a join needs a where predicate", start)
            left, right = sources
            return JoinBody(predicate, left.view, left.alias, right.view, right.alias)
        source = sources[0]
        if predicate is not None:
            if columns is not None:
                self._error("a selection cannot also project; select the columns in a separate view", start)
            return SelectBody(predicate, source.view, source.alias)
        names = tuple(c.split(".", 1)[1] for c in columns) if columns is not None else None
        return ProjectBody(names, source.view, source.alias)

    def _check_aliases(self, refs, aliases: Set[str], token: Token) -> None:
        for ref in sorted(refs):
            alias = ref.split(".", 1)[0]
            if alias not in aliases:
                raise AqlResolutionError(f"{token.line}:{token.column}: unknown alias {alias!r} in {ref!r}")

    def _union(self) -> ViewBody:
        views = [self._union_branch()]
        while self.current.is_keyword("union"):
            self._next()
            self._keyword("all")
            views.append(self._union_branch())
        if len(views) < 2:
            self._error("expected 'union all'")
        return UnionAllBody(tuple(views))

    def _union_branch(self) -> str:
        self._expect(TokenType.LPAREN)
        start = self.current
        body = self._select()
        self._expect(TokenType.RPAREN)
        if not isinstance(body, ProjectBody) or body.columns is not None:
            self._error("union branches must have the form 'select * from <view> <alias>'", start)
        return body.input

    # predicates

    def _predicate(self) -> Predicate:
        node = self._conjunction()
        while self._accept_keyword("or"):
            node = Or(node, self._conjunction())
        return node

    def _conjunction(self) -> Predicate:
        node = self._factor()
        while self._accept_keyword("and"):
            node = And(node, self._factor())
        return node

    def _factor(self) -> Predicate:
        if self._accept_keyword("not"):
            return Not(self._factor())
        if self.current.type == TokenType.LPAREN:
            self._next()
            node = self._predicate()
            self._expect(TokenType.RPAREN)
            return node
        name = self._name("predicate function")
        function = name.value.lower()
        self._expect(TokenType.LPAREN)
        if function == "follows":
            left = self._ref()
            right = self._comma_ref()
            low = self._comma_int()
            high = self._comma_int()
            if low > high:
                self._error("Follows minimum gap exceeds maximum gap", name)
            node: Predicate = Follows(left, right, low, high)
        elif function == "contains":
            node = Contains(self._ref(), self._comma_ref())
        elif function == "overlaps":
            node = Overlaps(self._ref(), self._comma_ref())
        elif function == "spanlengthgreaterthan":
            node = SpanLengthGreaterThan(self._ref(), self._comma_int())
        elif function == "matchesregex":
            column = self._ref()
            self._expect(TokenType.COMMA)
            pattern = self._expect(TokenType.REGEX, "/regex/")
            self._check_regex(pattern)
            node = MatchesRegex(column, pattern.value)
        else:
            self._error(f"unknown predicate function {name.value!r}", name)
        self._expect(TokenType.RPAREN)
        return node

    def _comma_ref(self) -> str:
        self._expect(TokenType.COMMA)
        return self._ref()

    def _comma_int(self) -> int:
        self._expect(TokenType.COMMA)
        return int(self._expect(TokenType.NUMBER, "integer").value)


def _resolve(parser: Parser, statements: List[Statement]) -> None:
    views: Dict[str, ViewDefinition] = {}
    dictionaries: Dict[str, CreateDictionary] = {}
    for statement in statements:
        if isinstance(statement, ViewDefinition):
            if statement.name in views or statement.name == DOCUMENT_VIEW:
                raise AqlResolutionError(f"{statement.position}: duplicate view name \"{statement.name}\"")
            views[statement.name] = statement
        elif isinstance(statement, CreateDictionary):
            if statement.name in dictionaries:
                raise AqlResolutionError(f"{statement.position}: duplicate dictionary \"{statement.name}\"")
            dictionaries[statement.name] = statement

    for name, token in parser.view_refs:
        if name not in views:
            raise AqlResolutionError(f"{token.line}:{token.column}: undefined view \"{name}\"")
    for name, token in parser.dictionary_refs:
        if name not in dictionaries:
            raise AqlResolutionError(f"{token.line}:{token.column}: undefined dictionary \"{name}\"")

    outputs = [s for s in statements if isinstance(s, OutputView)]
    if not outputs:
        raise AqlResolutionError("program has no output view statement")
    seen = set()
    for output in outputs:
        if output.name in seen:
            raise AqlResolutionError(f"{output.position}: view \"{output.name}\" is output twice")
        seen.add(output.name)


def parse_aql(source: str, base_dir: Optional[Path] = None) -> RuleProgram:
    """Parse and resolve a rule program.

    View references resolve against every view of the program; reference
    cycles are reported when the program is lowered.
    """
    parser = Parser(source)
    statements = parser.parse_statements()
    _resolve(parser, statements)
    program = RuleProgram(tuple(statements), base_dir)
    logger.debug(f"Parsed rule program: {len(program.views)} views, {len(program.outputs)} outputs")
    return program
