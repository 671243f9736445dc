"""MiniJ lexer.

Tokens carry byte spans into the UTF-8 encoding of the source. The pseudo
token "<mask>" lexes as a single token of kind MASK so masked token streams
stay representable; it is never part of a valid final program.

Invariant: joining lexemes of a token stream with single spaces and lexing
again yields the same kind/lexeme sequence.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .ast import Span


class LexError(Exception):
    def __init__(self, message: str, position: int, line: int):
        super().__init__(f"{message} at byte {position} (line {line})")
        self.position = position
        self.line = line


class TokenKind(enum.Enum):
    KEYWORD = "keyword"
    IDENT = "identifier"
    LITERAL = "literal"
    OPERATOR = "operator"
    SEPARATOR = "separator"
    MASK = "mask"


KEYWORDS = frozenset({
    "class", "int", "boolean", "String", "void",
    "if", "else", "while", "do", "return",
})

# true/false/null are literals, not keywords
WORD_LITERALS = frozenset({"true", "false", "null"})

MASK_TOKEN = "<mask>"


class Token:
    """One lexed token; equality and hashing ignore span and line.

    A plain __slots__ class instead of a frozen dataclass: the lexer
    constructs millions of these on large generation runs and the
    dataclass __init__ dominated the profile.
    """

    __slots__ = ("lexeme", "kind", "span", "line")

    def __init__(self, lexeme: str, kind: TokenKind,
                 span: Span = Span(0, 0), line: int = 0):
        self.lexeme = lexeme
        self.kind = kind
        self.span = span
        self.line = line

    def __eq__(self, other):
        if not isinstance(other, Token):
            return NotImplemented
        return self.lexeme == other.lexeme and self.kind is other.kind

    def __hash__(self):
        return hash((self.lexeme, self.kind))

    def __repr__(self):
        return f"Token(lexeme={self.lexeme!r}, kind={self.kind!r})"


_TOKEN_RE = re.compile(
    rb"(?P<ws>[ \t\r\n]+)"
    rb"|(?P<comment>//[^\n]*)"
    rb"|(?P<mask><mask>)"
    rb"|(?P<word>[A-Za-z_][A-Za-z0-9_]*)"
    rb"|(?P<number>[0-9]+)"
    rb'|(?P<string>"(?:[^"\\\n]|\\.)*")'
    rb"|(?P<op>\+\+|--|&&|\|\||==|!=|<=|>=|\+=|-=|\*=|/=|[+\-*/%<>=!])"
    rb"|(?P<sep>[(){}\[\];,.])"
)


def tokenize(text: str) -> list[Token]:
    """Lex MiniJ source into tokens. Raises LexError on illegal input."""
    data = text.encode("utf-8")
    tokens: list[Token] = []
    pos = 0
    line = 1
    n = len(data)
    while pos < n:
        m = _TOKEN_RE.match(data, pos)
        if m is None:
            raise LexError(f"illegal character {data[pos:pos + 1]!r}", pos, line)
        group = m.lastgroup
        raw = m.group()
        if group in ("ws", "comment"):
            line += raw.count(b"\n")
            pos = m.end()
            continue
        lexeme = raw.decode("utf-8")
        if group == "word":
            if lexeme in KEYWORDS:
                kind = TokenKind.KEYWORD
            elif lexeme in WORD_LITERALS:
                kind = TokenKind.LITERAL
            else:
                kind = TokenKind.IDENT
        elif group == "number" or group == "string":
            kind = TokenKind.LITERAL
        elif group == "op":
            kind = TokenKind.OPERATOR
        elif group == "sep":
            kind = TokenKind.SEPARATOR
        elif group == "mask":
            kind = TokenKind.MASK
        else:  # pragma: no cover - regex groups are exhaustive
            raise LexError(f"unhandled token {lexeme!r}", pos, line)
        tokens.append(Token(lexeme, kind, Span(pos, m.end() - pos), line))
        line += raw.count(b"\n")
        pos = m.end()
    return tokens


def lexemes(tokens: list[Token]) -> list[str]:
    return [t.lexeme for t in tokens]


def join_lexemes(tokens: list[Token]) -> str:
    """Single-space joining; re-lexing gives back the same kind/lexeme sequence."""
    return " ".join(t.lexeme for t in tokens)


def normalized_stream(text: str) -> tuple[tuple[str, str], ...]:
    """(kind, lexeme) pairs, independent of whitespace and comments."""
    return tuple((t.kind.value, t.lexeme) for t in tokenize(text))
