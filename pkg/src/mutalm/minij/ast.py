"""AST node types for MiniJ.

Every node carries a byte span into the source it was parsed from and a
1-based line number. Both are excluded from equality, so `==` compares
structure only: parse(render(u)) == u is the round-trip contract.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Union


def _meta(**kw):
    return field(compare=False, repr=False, **kw)


class Span(NamedTuple):
    """Byte offset range [start, start + length) in UTF-8 encoded source.

    A NamedTuple rather than a dataclass: one is built per token, and
    tuple construction is measurably cheaper on generation-sized runs.
    """

    start: int
    length: int

    @property
    def end(self) -> int:
        return self.start + self.length

    def contains(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end


# ============================================================
# Types
# ============================================================

@dataclass(frozen=True)
class TypeRef:
    """A MiniJ type: int, boolean, String, void, a class name, or an array
    of one of those (dims is 0 or 1; nested arrays are rejected upstream)."""

    name: str
    dims: int = 0
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)

    def __str__(self) -> str:
        return self.name + "[]" * self.dims

    @property
    def is_array(self) -> bool:
        return self.dims > 0


INT = TypeRef("int")
BOOLEAN = TypeRef("boolean")
STRING = TypeRef("String")
VOID = TypeRef("void")
NULL_T = TypeRef("null")  # type of the null literal only


# ============================================================
# Expressions
# ============================================================

@dataclass(frozen=True)
class IntLit:
    value: int
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class BoolLit:
    value: bool
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class StrLit:
    value: str
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class NullLit:
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class Name:
    """A variable reference (parameter, local, or field of the enclosing class)."""

    ident: str
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class TypeName:
    """A class name (or the built-in Math) used in expression position.

    For a declared class this denotes the class singleton; Math is only
    legal as a method-call receiver.
    """

    ident: str
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class Unary:
    op: str  # one of ! - ++ --
    operand: "Expr"
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    op_span: Span = _meta(default=Span(0, 0))
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class FieldAccess:
    receiver: "Expr"
    name: str
    name_span: Span = _meta(default=Span(0, 0))
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class Call:
    """Method call. receiver is None for bare calls on the enclosing class."""

    receiver: "Expr | None"
    name: str
    args: tuple["Expr", ...]
    name_span: Span = _meta(default=Span(0, 0))
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class Index:
    array: "Expr"
    index: "Expr"
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


Expr = Union[IntLit, BoolLit, StrLit, NullLit, Name, TypeName, Unary, Binary,
             FieldAccess, Call, Index]


# ============================================================
# Statements
# ============================================================

@dataclass(frozen=True)
class VarDecl:
    type: TypeRef
    name: str
    init: "Expr | None"
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class Assign:
    target: "Expr"  # Name, FieldAccess, or Index
    op: str  # = += -= *= /=
    value: "Expr"
    op_span: Span = _meta(default=Span(0, 0))
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class Block:
    statements: tuple["Stmt", ...]
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class If:
    cond: "Expr"
    then: Block
    orelse: "Block | If | None"
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class While:
    cond: "Expr"
    body: Block
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class DoWhile:
    body: Block
    cond: "Expr"
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class Return:
    value: "Expr | None"
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class ExprStmt:
    expr: "Expr"
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


Stmt = Union[VarDecl, Assign, If, While, DoWhile, Return, ExprStmt, Block]


# ============================================================
# Declarations
# ============================================================

@dataclass(frozen=True)
class Param:
    type: TypeRef
    name: str
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class FieldDecl:
    type: TypeRef
    name: str
    init: "Expr | None"
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class MethodDecl:
    ret_type: TypeRef
    name: str
    params: tuple[Param, ...]
    body: Block
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class ClassDecl:
    name: str
    fields: tuple[FieldDecl, ...]
    methods: tuple[MethodDecl, ...]
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=0)


@dataclass(frozen=True)
class Program:
    classes: tuple[ClassDecl, ...]
    span: Span = _meta(default=Span(0, 0))
    line: int = _meta(default=1)


SourceUnit = Program


# ============================================================
# Walkers
# ============================================================

def child_exprs(node) -> tuple:
    """Direct expression children of an expression node."""
    if isinstance(node, Unary):
        return (node.operand,)
    if isinstance(node, Binary):
        return (node.left, node.right)
    if isinstance(node, FieldAccess):
        return (node.receiver,)
    if isinstance(node, Call):
        return ((node.receiver,) if node.receiver is not None else ()) + node.args
    if isinstance(node, Index):
        return (node.array, node.index)
    return ()


def walk_exprs(expr):
    """Yield expr and every nested expression, preorder."""
    yield expr
    for child in child_exprs(expr):
        yield from walk_exprs(child)


def stmt_exprs(stmt) -> tuple:
    """Top-level expressions of one statement (not of nested statements)."""
    if isinstance(stmt, VarDecl):
        return (stmt.init,) if stmt.init is not None else ()
    if isinstance(stmt, Assign):
        return (stmt.target, stmt.value)
    if isinstance(stmt, (If, While, DoWhile)):
        return (stmt.cond,)
    if isinstance(stmt, Return):
        return (stmt.value,) if stmt.value is not None else ()
    if isinstance(stmt, ExprStmt):
        return (stmt.expr,)
    return ()


def child_stmts(stmt) -> tuple:
    if isinstance(stmt, Block):
        return stmt.statements
    if isinstance(stmt, If):
        more = (stmt.orelse,) if stmt.orelse is not None else ()
        return (stmt.then,) + more
    if isinstance(stmt, While):
        return (stmt.body,)
    if isinstance(stmt, DoWhile):
        return (stmt.body,)
    return ()


def walk_stmts(root):
    """Yield every statement under root (a Block or Stmt), preorder."""
    yield root
    for child in child_stmts(root):
        yield from walk_stmts(child)


def walk_program_stmts(unit: Program):
    """Yield (class, method, stmt) for every statement in method bodies, preorder."""
    for cls in unit.classes:
        for method in cls.methods:
            for stmt in walk_stmts(method.body):
                yield cls, method, stmt


def statement_ordinals(unit: Program) -> dict[int, int]:
    """Stable preorder ordinal for each statement object, keyed by id()."""
    ordinals: dict[int, int] = {}
    for n, (_, _, stmt) in enumerate(walk_program_stmts(unit)):
        ordinals[id(stmt)] = n
    return ordinals
