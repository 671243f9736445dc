"""Selection and masking of mutation targets.

Walks method bodies, collects the AST nodes worth mutating (operands,
operators, member names, whole array indices and static type references,
but never separators or flow-control keywords), and turns each one into a
token sequence with a single ``<mask>`` placeholder plus the byte-level
splice information needed to rebuild source text around a prediction.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .minij import MASK_TOKEN, Span, parse, render, tokenize
from .minij.ast import (Assign, Binary, BoolLit, Call, DoWhile, ExprStmt,
                        FieldAccess, If, Index, IntLit, Name, NullLit, Return,
                        SourceUnit, StrLit, TypeName, Unary, VarDecl, While,
                        statement_ordinals)
from .minij.lexer import Token, TokenKind
from .minij.parser import ASSIGN_OPS

NODE_KINDS = frozenset({
    "literal", "identifier", "binary-operator", "unary-operator",
    "assignment-operator", "object-field", "method-name", "array-index",
    "static-type-ref",
})

DEFAULT_WINDOW = 512


class TargetError(Exception):
    """Base class for masking failures."""


class TargetStale(TargetError):
    """The target's span no longer lines up with the unit's tokens."""


class InvalidLimit(TargetError):
    """crop_window was given a non-positive token limit."""


@dataclass(frozen=True)
class MutationTarget:
    """One maskable node: what kind it is and where it sits."""

    node_kind: str
    span: Span
    line: int
    enclosing_statement_id: int

    def __post_init__(self):
        if self.node_kind not in NODE_KINDS:
            raise ValueError(f"unknown node kind {self.node_kind!r}")


@dataclass(frozen=True)
class MaskedSequence:
    """A full-program token stream with exactly one placeholder.

    ``splice_span`` is the byte range of ``source_text`` that a predicted
    token replaces; ``splice_suffix`` is text appended to the prediction
    before splicing (the "=" kept when an assignment operator is masked).
    """

    tokens: tuple[str, ...]
    mask_index: int
    origin: object
    original_lexeme: str
    source_text: str = field(repr=False, compare=False, default="")
    splice_span: Span = field(compare=False, default=Span(0, 0))
    splice_suffix: str = field(compare=False, default="")

    def __post_init__(self):
        if self.tokens.count(MASK_TOKEN) != 1:
            raise ValueError("sequence must contain exactly one mask")
        if self.tokens[self.mask_index] != MASK_TOKEN:
            raise ValueError("mask_index does not point at the mask")


# ---------------------------------------------------------------
# collection
# ---------------------------------------------------------------

_LITERALS = (IntLit, BoolLit, StrLit, NullLit)


def _expr_targets(expr):
    """Yield (kind, span, line) for every maskable node under expr."""
    if isinstance(expr, _LITERALS):
        yield "literal", expr.span, expr.line
    elif isinstance(expr, Name):
        yield "identifier", expr.span, expr.line
    elif isinstance(expr, TypeName):
        yield "static-type-ref", expr.span, expr.line
    elif isinstance(expr, Unary):
        op_span = Span(expr.span.start, len(expr.op))
        yield "unary-operator", op_span, expr.line
        yield from _expr_targets(expr.operand)
    elif isinstance(expr, Binary):
        yield "binary-operator", expr.op_span, expr.line
        yield from _expr_targets(expr.left)
        yield from _expr_targets(expr.right)
    elif isinstance(expr, FieldAccess):
        yield "object-field", expr.name_span, expr.line
        yield from _expr_targets(expr.receiver)
    elif isinstance(expr, Call):
        yield "method-name", expr.name_span, expr.line
        if expr.receiver is not None:
            yield from _expr_targets(expr.receiver)
        for arg in expr.args:
            yield from _expr_targets(arg)
    elif isinstance(expr, Index):
        yield "array-index", expr.index.span, expr.index.line
        yield from _expr_targets(expr.array)
        yield from _expr_targets(expr.index)


def _stmt_targets(stmt):
    if isinstance(stmt, VarDecl):
        if stmt.init is not None:  # the declaration itself is not mutated
            yield from _expr_targets(stmt.init)
    elif isinstance(stmt, Assign):
        yield from _expr_targets(stmt.target)
        yield "assignment-operator", stmt.op_span, stmt.line
        yield from _expr_targets(stmt.value)
    elif isinstance(stmt, (If, While, DoWhile)):
        yield from _expr_targets(stmt.cond)
    elif isinstance(stmt, Return):
        if stmt.value is not None:
            yield from _expr_targets(stmt.value)
    elif isinstance(stmt, ExprStmt):
        yield from _expr_targets(stmt.expr)


def collect_targets(unit: SourceUnit) -> list[MutationTarget]:
    """All maskable nodes in method bodies, ordered by (line, span)."""
    from .minij.ast import walk_program_stmts

    ordinals = statement_ordinals(unit)
    found = []
    for _cls, _method, stmt in walk_program_stmts(unit):
        sid = ordinals[id(stmt)]
        for kind, span, line in _stmt_targets(stmt):
            found.append(MutationTarget(kind, span, line, sid))
    found.sort(key=lambda t: (t.line, t.span.start, t.span.length,
                              t.node_kind))
    return found


# ---------------------------------------------------------------
# masking
# ---------------------------------------------------------------

_SINGLE_TOKEN_KINDS = {
    "literal": TokenKind.LITERAL,
    "identifier": TokenKind.IDENT,
    "object-field": TokenKind.IDENT,
    "method-name": TokenKind.IDENT,
    "static-type-ref": TokenKind.IDENT,
    "binary-operator": TokenKind.OPERATOR,
    "unary-operator": TokenKind.OPERATOR,
}


def _covered_range(tokens: tuple[Token, ...], span: Span) -> tuple[int, int]:
    """Indices [i, j) of the tokens exactly tiling span, else TargetStale."""
    i = 0
    while i < len(tokens) and tokens[i].span.start < span.start:
        i += 1
    if i == len(tokens) or tokens[i].span.start != span.start:
        raise TargetStale(f"no token starts at byte {span.start}")
    j = i
    while j < len(tokens) and tokens[j].span.end <= span.end:
        j += 1
    if j == i or tokens[j - 1].span.end != span.end:
        raise TargetStale(f"no token run ends at byte {span.end}")
    return i, j


def mask_target(unit: SourceUnit, target: MutationTarget,
                _prepared: tuple[str, tuple[Token, ...]] | None = None,
                ) -> MaskedSequence:
    """Replace the target's token(s) with one mask placeholder.

    The unit's spans must describe its canonical rendering (i.e. it was
    parsed from `render(unit)`); anything else raises TargetStale.
    """
    if _prepared is None:
        text = render(unit)
        tokens = tokenize(text)
    else:
        text, tokens = _prepared
    data = text.encode("utf-8")
    if target.span.end > len(data):
        raise TargetStale("target span exceeds the unit's source")
    i, j = _covered_range(tokens, target.span)
    lexemes = tuple(t.lexeme for t in tokens)

    if target.node_kind == "assignment-operator":
        if j - i != 1 or tokens[i].lexeme not in ASSIGN_OPS:
            raise TargetStale("assignment target does not cover an "
                              "assignment operator")
        # "sum += c" masks only the augmenting part: "sum <mask>= c"
        op = tokens[i].lexeme
        masked = lexemes[:i] + (MASK_TOKEN, "=") + lexemes[j:]
        return MaskedSequence(masked, i, target, op[:-1], text,
                              target.span, "=")

    expected = _SINGLE_TOKEN_KINDS.get(target.node_kind)
    if expected is not None:
        if j - i != 1 or tokens[i].kind is not expected:
            raise TargetStale(f"{target.node_kind} target must cover one "
                              f"{expected.name.lower()} token")
    masked = lexemes[:i] + (MASK_TOKEN,) + lexemes[j:]
    original = data[target.span.start:target.span.end].decode("utf-8")
    return MaskedSequence(masked, i, target, original, text, target.span, "")


def mask_all(unit: SourceUnit,
             targets: list[MutationTarget] | None = None,
             ) -> list[MaskedSequence]:
    """Masked sequence for every target, tokenizing the unit only once."""
    text = render(unit)
    prepared = (text, tokenize(text))
    if targets is None:
        targets = collect_targets(unit)
    return [mask_target(unit, t, _prepared=prepared) for t in targets]


# ---------------------------------------------------------------
# window cropping
# ---------------------------------------------------------------

def crop_window(seq: MaskedSequence, max_tokens: int) -> MaskedSequence:
    """Contiguous slice of at most max_tokens centered on the mask."""
    if max_tokens < 1:
        raise InvalidLimit(f"window limit must be >= 1, got {max_tokens}")
    n = len(seq.tokens)
    if n <= max_tokens:
        return seq
    before = (max_tokens - 1) // 2
    start = seq.mask_index - before
    start = max(0, min(start, n - max_tokens))
    return dataclasses.replace(seq, tokens=seq.tokens[start:start + max_tokens],
                               mask_index=seq.mask_index - start)
