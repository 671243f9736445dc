"""Canonical MiniJ renderer: one statement per line, fixed spacing.

render is the inverse of parse up to spans: parse(render(u)) == u, and
rendering is idempotent on parsed text (render(parse(render(u))) == render(u)).
"""
from __future__ import annotations

from .ast import (Assign, Binary, Block, BoolLit, Call, ClassDecl, DoWhile,
                  ExprStmt, FieldAccess, FieldDecl, If, Index, IntLit,
                  MethodDecl, Name, NullLit, Program, Return, StrLit,
                  TypeName, TypeRef, Unary, VarDecl, While)

_INDENT = "    "

# Precedence: higher binds tighter. Postfix/primary sit above all binaries.
_BIN_PREC = {
    "||": 1, "&&": 2,
    "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "%": 6,
}
_UNARY_PREC = 7
_POSTFIX_PREC = 8


def render(unit: Program) -> str:
    """Render a Program to canonical source text (ends with one newline)."""
    lines: list[str] = []
    for cls in unit.classes:
        _render_class(cls, lines)
    return "\n".join(lines) + "\n"


def _render_class(cls: ClassDecl, lines: list[str]):
    lines.append(f"class {cls.name} {{")
    for f in cls.fields:
        init = f" = {render_expr(f.init)}" if f.init is not None else ""
        lines.append(f"{_INDENT}{f.type} {f.name}{init};")
    for m in cls.methods:
        _render_method(m, lines)
    lines.append("}")


def _render_method(m: MethodDecl, lines: list[str]):
    params = ", ".join(f"{p.type} {p.name}" for p in m.params)
    lines.append(f"{_INDENT}{m.ret_type} {m.name}({params}) {{")
    _render_stmts(m.body.statements, lines, 2)
    lines.append(f"{_INDENT}}}")


def _render_stmts(stmts, lines: list[str], depth: int):
    for stmt in stmts:
        _render_stmt(stmt, lines, depth)


def _render_stmt(stmt, lines: list[str], depth: int):
    pad = _INDENT * depth
    if isinstance(stmt, VarDecl):
        init = f" = {render_expr(stmt.init)}" if stmt.init is not None else ""
        lines.append(f"{pad}{stmt.type} {stmt.name}{init};")
    elif isinstance(stmt, Assign):
        lines.append(f"{pad}{render_expr(stmt.target)} {stmt.op} "
                     f"{render_expr(stmt.value)};")
    elif isinstance(stmt, If):
        _render_if(stmt, lines, depth)
    elif isinstance(stmt, While):
        lines.append(f"{pad}while ({render_expr(stmt.cond)}) {{")
        _render_stmts(stmt.body.statements, lines, depth + 1)
        lines.append(f"{pad}}}")
    elif isinstance(stmt, DoWhile):
        lines.append(f"{pad}do {{")
        _render_stmts(stmt.body.statements, lines, depth + 1)
        lines.append(f"{pad}}} while ({render_expr(stmt.cond)});")
    elif isinstance(stmt, Return):
        if stmt.value is None:
            lines.append(f"{pad}return;")
        else:
            lines.append(f"{pad}return {render_expr(stmt.value)};")
    elif isinstance(stmt, ExprStmt):
        lines.append(f"{pad}{render_expr(stmt.expr)};")
    elif isinstance(stmt, Block):
        lines.append(f"{pad}{{")
        _render_stmts(stmt.statements, lines, depth + 1)
        lines.append(f"{pad}}}")
    else:  # pragma: no cover
        raise TypeError(f"unknown statement {stmt!r}")


def _render_if(stmt: If, lines: list[str], depth: int):
    pad = _INDENT * depth
    lines.append(f"{pad}if ({render_expr(stmt.cond)}) {{")
    _render_stmts(stmt.then.statements, lines, depth + 1)
    node = stmt.orelse
    while isinstance(node, If):
        lines.append(f"{pad}}} else if ({render_expr(node.cond)}) {{")
        _render_stmts(node.then.statements, lines, depth + 1)
        node = node.orelse
    if node is None:
        lines.append(f"{pad}}}")
    else:
        lines.append(f"{pad}}} else {{")
        _render_stmts(node.statements, lines, depth + 1)
        lines.append(f"{pad}}}")


# ============================================================
# expressions
# ============================================================

def render_expr(expr) -> str:
    return _expr(expr, 0)


def _expr(expr, ctx_prec: int) -> str:
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, NullLit):
        return "null"
    if isinstance(expr, StrLit):
        return _escape(expr.value)
    if isinstance(expr, (Name, TypeName)):
        return expr.ident
    if isinstance(expr, Binary):
        prec = _BIN_PREC[expr.op]
        # left-associative: right child needs parens at equal precedence
        left = _expr(expr.left, prec)
        right = _expr(expr.right, prec + 1)
        text = f"{left} {expr.op} {right}"
        return f"({text})" if prec < ctx_prec else text
    if isinstance(expr, Unary):
        # Parenthesized nested unary avoids re-lexing "- -a" as "--a".
        inner = _expr(expr.operand, _UNARY_PREC)
        if isinstance(expr.operand, Unary):
            inner = f"({inner})"
        text = f"{expr.op}{inner}"
        return f"({text})" if ctx_prec > _UNARY_PREC else text
    if isinstance(expr, FieldAccess):
        return f"{_expr(expr.receiver, _POSTFIX_PREC)}.{expr.name}"
    if isinstance(expr, Call):
        args = ", ".join(_expr(a, 0) for a in expr.args)
        if expr.receiver is None:
            return f"{expr.name}({args})"
        return f"{_expr(expr.receiver, _POSTFIX_PREC)}.{expr.name}({args})"
    if isinstance(expr, Index):
        return f"{_expr(expr.array, _POSTFIX_PREC)}[{_expr(expr.index, 0)}]"
    raise TypeError(f"unknown expression {expr!r}")  # pragma: no cover


def _escape(value: str) -> str:
    out = ['"']
    for ch in value:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)
