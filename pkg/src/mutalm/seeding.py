"""Second-order mutation candidates built by extending conditions.

Two seeding schemes grow an existing condition Exp_t into a compound one:

* class-conditions: every other condition in the same class (minus
  null-checks) is attached as "Exp_t op [!](Exp_s)" / "[!](Exp_s) op Exp_t"
  over op in {&&, ||} — eight candidates per sibling condition.
* variables: for each variable inside an if condition and each other
  visible variable of the same type, "var_t rel var_i" is attached in both
  positions with both logical operators — no negation in this scheme.

The seeded sub-expression's tokens (never its parentheses) become the mask
sites that second-order generation feeds to the predictor one at a time.
"""
from __future__ import annotations

from dataclasses import dataclass

from .minij import Span, analyze, render_expr, tokenize
from .minij.analysis import Analysis, VarBinding
from .minij.ast import (Binary, DoWhile, If, Name, NullLit, Return,
                        SourceUnit, While, walk_exprs, walk_stmts)
from .minij.lexer import TokenKind

LOGICAL_OPS = ("&&", "||")
ORDERS = ("original-first", "seeded-first")
SCHEMES = ("class-conditions", "variables")
STATEMENT_KINDS = ("if", "while", "do", "return")

INT_REL_OPS = ("<", "<=", ">", ">=", "==", "!=")
EQUALITY_OPS = ("==", "!=")


def rel_ops(var_type) -> tuple[str, ...]:
    """Relational operators applicable to values of the given type."""
    if var_type.name == "int" and var_type.dims == 0:
        return INT_REL_OPS
    return EQUALITY_OPS


def is_null_check(expr) -> bool:
    """A top-level ==/!= comparison against the null literal."""
    return (isinstance(expr, Binary) and expr.op in EQUALITY_OPS
            and (isinstance(expr.left, NullLit)
                 or isinstance(expr.right, NullLit)))


@dataclass(frozen=True)
class SeededCondition:
    """One candidate compound condition plus where to mask inside it.

    mask_sites are indices into the token stream of new_condition_text and
    cover exactly the seeded material: the optional "!", every operand and
    operator of the seeded sub-expression, and none of the parentheses.
    target_span is the byte range of the original condition in the unit
    this candidate was derived from.
    """

    original_expr: str
    seeded_expr: str
    op: str
    negated: bool
    order: str
    scheme: str
    statement_kind: str
    new_condition_text: str
    mask_sites: tuple[int, ...]
    target_span: Span
    line: int

    def __post_init__(self):
        if self.op not in LOGICAL_OPS:
            raise ValueError(f"op must be && or ||, got {self.op!r}")
        if self.order not in ORDERS:
            raise ValueError(f"unknown order {self.order!r}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.statement_kind not in STATEMENT_KINDS:
            raise ValueError(f"unknown statement kind "
                             f"{self.statement_kind!r}")
        if self.new_condition_text != _render_candidate(
                self.original_expr, self.seeded_expr, self.op,
                self.negated, self.order):
            raise ValueError("rendered text does not match its parts")


def _render_candidate(original: str, seeded: str, op: str,
                      negated: bool, order: str) -> str:
    part = f"!({seeded})" if negated else seeded
    if order == "original-first":
        return f"{original} {op} {part}"
    return f"{part} {op} {original}"


def _build(original: str, seeded: str, op: str, negated: bool, order: str,
           scheme: str, kind: str, span: Span, line: int) -> SeededCondition:
    text = _render_candidate(original, seeded, op, negated, order)
    tokens = tokenize(text)
    n_original = len(tokenize(original))
    if order == "original-first":
        lo, hi = n_original + 1, len(tokens)
    else:
        lo, hi = 0, len(tokens) - n_original - 1
    sites = tuple(i for i in range(lo, hi)
                  if tokens[i].kind is not TokenKind.SEPARATOR)
    return SeededCondition(original, seeded, op, negated, order, scheme,
                           kind, text, sites, span, line)


# ---------------------------------------------------------------
# condition discovery
# ---------------------------------------------------------------

def statement_kind_of(stmt) -> str | None:
    if isinstance(stmt, If):
        return "if"
    if isinstance(stmt, While):
        return "while"
    if isinstance(stmt, DoWhile):
        return "do"
    if isinstance(stmt, Return):
        return "return"
    return None


def condition_sites(unit: SourceUnit, info: Analysis | None = None):
    """Yield (cls, method, stmt, kind, expr) for every seedable condition.

    Conditions are the guards of if/while/do statements and boolean-valued
    return expressions.
    """
    if info is None:
        info = analyze(unit)
    for cls in unit.classes:
        for method in cls.methods:
            for stmt in walk_stmts(method.body):
                kind = statement_kind_of(stmt)
                if kind is None:
                    continue
                if kind == "return":
                    expr = stmt.value
                    if expr is None:
                        continue
                    expr_t = info.type_of(expr)
                    if expr_t is None or expr_t.name != "boolean" \
                            or expr_t.dims != 0:
                        continue
                else:
                    expr = stmt.cond
                yield cls, method, stmt, kind, expr


def normalized_expr_key(expr) -> tuple[str, ...]:
    return tuple(t.lexeme for t in tokenize(render_expr(expr)))


def collect_class_conditions(unit: SourceUnit, target,
                             info: Analysis | None = None) -> list:
    """S_E: other conditions of the class holding target, no null-checks.

    De-duplicated by normalized token stream; any condition spelled the
    same as the target is excluded along with the target itself.
    """
    if info is None:
        info = analyze(unit)
    owner = None
    for cls, _method, _stmt, _kind, expr in condition_sites(unit, info):
        if expr is target:
            owner = cls
            break
    if owner is None:
        raise ValueError("target is not a seedable condition of this unit")
    target_key = normalized_expr_key(target)
    found: dict[tuple[str, ...], object] = {}
    for cls, _method, _stmt, _kind, expr in condition_sites(unit, info):
        if cls is not owner or expr is target or is_null_check(expr):
            continue
        key = normalized_expr_key(expr)
        if key == target_key:
            continue
        found.setdefault(key, expr)
    return list(found.values())


# ---------------------------------------------------------------
# scheme 1: sibling class conditions
# ---------------------------------------------------------------

def seed_with_conditions(exp_t, s_e, statement_kind: str = "if",
                         line: int | None = None) -> list[SeededCondition]:
    """Full cross-product: per sibling, 2 orders x 2 ops x 2 negations."""
    original = render_expr(exp_t)
    out = []
    for exp_s in s_e:
        seeded = render_expr(exp_s)
        for order in ORDERS:
            for op in LOGICAL_OPS:
                for negated in (False, True):
                    out.append(_build(original, seeded, op, negated, order,
                                      "class-conditions", statement_kind,
                                      exp_t.span,
                                      exp_t.line if line is None else line))
    return out


# ---------------------------------------------------------------
# scheme 2: same-type variable comparisons (if conditions only)
# ---------------------------------------------------------------

def seed_with_variables(exp_t, scope: tuple[VarBinding, ...],
                        line: int | None = None) -> list[SeededCondition]:
    """Attach "var_t rel var_i" for each same-type variable pairing."""
    original = render_expr(exp_t)
    by_name = {binding.name: binding for binding in scope}
    seen: dict[str, VarBinding] = {}
    for node in walk_exprs(exp_t):
        if isinstance(node, Name) and node.ident in by_name:
            seen.setdefault(node.ident, by_name[node.ident])
    out = []
    for var_t in seen.values():
        for var_i in scope:
            if var_i.name == var_t.name or var_i.type != var_t.type:
                continue
            for rel in rel_ops(var_t.type):
                seeded = f"{var_t.name} {rel} {var_i.name}"
                for order in ORDERS:
                    for op in LOGICAL_OPS:
                        out.append(_build(
                            original, seeded, op, False, order, "variables",
                            "if", exp_t.span,
                            exp_t.line if line is None else line))
    return out
