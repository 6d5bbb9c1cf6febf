"""Tokenizer for the rule language."""

from dataclasses import dataclass
from enum import Enum
from typing import List

from ..exceptions import AqlSyntaxError

KEYWORDS = frozenset({
    "create", "dictionary", "view", "as", "extract", "regex", "on", "from", "file",
    "select", "where", "union", "all", "consolidate", "using", "output", "and", "or", "not",
})

PUNCTUATION = {";": "SEMI", ",": "COMMA", "(": "LPAREN", ")": "RPAREN", ".": "DOT", "*": "STAR"}


class TokenType(str, Enum):
    IDENT = "identifier"
    KEYWORD = "keyword"
    STRING = "string"
    REGEX = "regex"
    NUMBER = "number"
    SEMI = "';'"
    COMMA = "','"
    LPAREN = "'('"
    RPAREN = "')'"
    DOT = "'.'"
    STAR = "'*'"
    EOF = "end of input"


@dataclass(frozen=True)
class Token:
    type: TokenType
    value: str
    line: int
    column: int

    def is_keyword(self, word: str) -> bool:
        return self.type == TokenType.KEYWORD and self.value == word

    def describe(self) -> str:
        if self.type == TokenType.EOF:
            return "end of input"
        return f"{self.type.value} {self.value!r}"


class Lexer:
    def __init__(self, source: str):
        self.source = source
        self.pos = 0
        self.line = 1
        self.column = 1

    def _advance(self, count: int = 1) -> None:
        for _ in range(count):
            if self.source[self.pos] == "\n":
                self.line += 1
                self.column = 1
            else:
                self.column += 1
            self.pos += 1

    def _peek(self, offset: int = 0) -> str:
        index = self.pos + offset
        return self.source[index] if index < len(self.source) else ""

    def _delimited(self, quote: str, kind: TokenType) -> Token:
        """Quoted string or /regex/; a doubled quote (strings) or \\/ (regexes) escapes the delimiter."""
        line, column = self.line, self.column
        self._advance()
        chars = []
        while True:
            ch = self._peek()
            if ch == "" or (ch == "\n" and kind == TokenType.REGEX):
                raise AqlSyntaxError(f"unterminated {kind.value}", line, column)
            if kind == TokenType.STRING and ch == quote and self._peek(1) == quote:
                chars.append(quote)
                self._advance(2)
                continue
            if kind == TokenType.REGEX and ch == "\\" and self._peek(1) == "/":
                chars.append("/")
                self._advance(2)
                continue
            if kind == TokenType.REGEX and ch == "\\":
                chars.append(ch + self._peek(1))
                self._advance(2)
                continue
            self._advance()
            if ch == quote:
                return Token(kind, "".join(chars), line, column)
            chars.append(ch)

    def tokenize(self) -> List[Token]:
        tokens: List[Token] = []
        while self.pos < len(self.source):
            ch = self._peek()
            if ch.isspace():
                self._advance()
            elif ch == "-" and self._peek(1) == "-":
                while self._peek() not in ("", "\n"):
                    self._advance()
            elif ch == "'":
                tokens.append(self._delimited("'", TokenType.STRING))
            elif ch == "/":
                tokens.append(self._delimited("/", TokenType.REGEX))
            elif ch.isdigit() or (ch == "-" and self._peek(1).isdigit()):
                line, column = self.line, self.column
                start = self.pos
                self._advance()
                while self._peek().isdigit():
                    self._advance()
                tokens.append(Token(TokenType.NUMBER, self.source[start:self.pos], line, column))
            elif ch.isalpha() or ch == "_":
                line, column = self.line, self.column
                start = self.pos
                while self._peek().isalnum() or self._peek() == "_":
                    self._advance()
                word = self.source[start:self.pos]
                if word.lower() in KEYWORDS:
                    tokens.append(Token(TokenType.KEYWORD, word.lower(), line, column))
                else:
                    tokens.append(Token(TokenType.IDENT, word, line, column))
            elif ch in PUNCTUATION:
                tokens.append(Token(TokenType[PUNCTUATION[ch]], ch, self.line, self.column))
                self._advance()
            else:
                raise AqlSyntaxError(f"unexpected character {ch!r}", self.line, self.column)
        tokens.append(Token(TokenType.EOF, "", self.line, self.column))
        return tokens


def tokenize(source: str) -> List[Token]:
    return Lexer(source).tokenize()
