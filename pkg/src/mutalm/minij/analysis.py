"""Name resolution, type checking, and return-path analysis for MiniJ.

analyze() produces both the ValidationReport and the side tables other
modules need: the static type of every expression and the variables visible
at each statement. Semantics are Java-flavored but deliberately looser in
one spot: locals default-initialize (0/false/null), so there is no
definite-assignment analysis.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .ast import (Assign, Binary, Block, BoolLit, Call, ClassDecl, DoWhile,
                  ExprStmt, FieldAccess, If, Index, IntLit, MethodDecl, Name,
                  NullLit, Program, Return, Span, StrLit, TypeName, TypeRef,
                  Unary, VarDecl, While, BOOLEAN, INT, NULL_T, STRING, VOID)
from .lexer import LexError
from .parser import ParseError, parse

PRIMITIVE_TYPES = frozenset({"int", "boolean", "String"})

# Built-in Math methods: name -> (param types, return type)
MATH_METHODS = {
    "abs": ((INT,), INT),
    "max": ((INT, INT), INT),
    "min": ((INT, INT), INT),
    "random": ((), INT),
}

INT_MAX = 2**63 - 1


@dataclass(frozen=True)
class Diagnostic:
    span: Span
    message: str
    category: str  # parse | name-resolution | type

    def __str__(self) -> str:
        return f"[{self.category}] byte {self.span.start}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    diagnostics: tuple[Diagnostic, ...]

    @classmethod
    def from_diagnostics(cls, diagnostics) -> "ValidationReport":
        diags = tuple(sorted(diagnostics,
                             key=lambda d: (d.span.start, d.message)))
        return cls(not diags, diags)


@dataclass(frozen=True)
class VarBinding:
    name: str
    type: TypeRef
    kind: str  # field | param | local


@dataclass
class Analysis:
    """Typed view of a program; report plus lookup tables keyed by id(node)."""

    report: ValidationReport
    expr_types: dict[int, TypeRef] = field(default_factory=dict)
    visible_vars: dict[int, tuple[VarBinding, ...]] = field(default_factory=dict)

    def type_of(self, expr) -> TypeRef | None:
        return self.expr_types.get(id(expr))

    def vars_at(self, stmt) -> tuple[VarBinding, ...]:
        return self.visible_vars.get(id(stmt), ())


def validate(unit: Program) -> ValidationReport:
    return analyze(unit).report


def check_source(text: str, tokens=None) -> ValidationReport:
    """Validate raw text; lex/parse failures become parse-category diagnostics.

    Pre-lexed tokens of the same text may be passed through to parse().
    """
    try:
        unit = parse(text, tokens)
    except (LexError, ParseError) as err:
        pos = getattr(err, "position", 0)
        diag = Diagnostic(Span(pos, 1), str(err), "parse")
        return ValidationReport(False, (diag,))
    return validate(unit)


def analyze(unit: Program) -> Analysis:
    checker = _Checker(unit)
    checker.run()
    analysis = Analysis(ValidationReport.from_diagnostics(checker.diagnostics))
    analysis.expr_types = checker.expr_types
    analysis.visible_vars = checker.visible_vars
    return analysis


class _Checker:
    def __init__(self, unit: Program):
        self.unit = unit
        self.diagnostics: list[Diagnostic] = []
        self.expr_types: dict[int, TypeRef] = {}
        self.visible_vars: dict[int, tuple[VarBinding, ...]] = {}
        self.classes: dict[str, ClassDecl] = {}
        self.reserved = {"Math"}

    def error(self, node, message: str, category: str = "type"):
        self.diagnostics.append(Diagnostic(node.span, message, category))

    # ------------------------------------------------------------

    def run(self):
        for cls in self.unit.classes:
            if cls.name in self.classes or cls.name in self.reserved:
                self.error(cls, f"duplicate class name '{cls.name}'",
                           "name-resolution")
            else:
                self.classes[cls.name] = cls
        self.reserved |= set(self.classes)
        for cls in self.unit.classes:
            self.check_class(cls)

    def check_class(self, cls: ClassDecl):
        self.cls = cls
        self.fields: dict[str, TypeRef] = {}
        self.methods: dict[str, MethodDecl] = {}
        for f in cls.fields:
            self.check_declared_type(f, f.type)
            if f.name in self.fields or f.name in self.reserved:
                self.error(f, f"duplicate or reserved field name '{f.name}'",
                           "name-resolution")
            self.fields[f.name] = f.type
        for m in cls.methods:
            if m.ret_type.name != "void":
                self.check_declared_type(m, m.ret_type)
            if m.name in self.methods or m.name in self.reserved:
                self.error(m, f"duplicate or reserved method name '{m.name}'",
                           "name-resolution")
            self.methods[m.name] = m
        # field initializers are typed in class scope (no params, no locals)
        self.method = None
        self.scopes = []
        for f in cls.fields:
            if f.init is not None:
                t = self.type_expr(f.init)
                self.check_assignable(f, f.type, t, "field initializer")
        for m in cls.methods:
            self.check_method(m)

    def check_method(self, m: MethodDecl):
        self.method = m
        self.scopes = [{}]
        for p in m.params:
            self.check_declared_type(p, p.type)
            if p.name in self.scopes[0] or p.name in self.reserved:
                self.error(p, f"duplicate or reserved parameter '{p.name}'",
                           "name-resolution")
            self.scopes[0][p.name] = VarBinding(p.name, p.type, "param")
        self.check_block(m.body)
        if m.ret_type.name != "void" and not _definitely_returns(m.body):
            self.error(m, f"method '{m.name}' must return a value on all "
                          f"paths", "type")

    def check_declared_type(self, node, t: TypeRef):
        if t.name not in PRIMITIVE_TYPES and t.name not in self.classes:
            self.error(node, f"unknown type '{t}'", "name-resolution")

    # ------------------------------------------------------------
    # statements
    # ------------------------------------------------------------

    def record_scope(self, stmt):
        # Declaration order: fields, then params, then locals outermost-in.
        # A shadowing binding replaces the shadowed one in place.
        ordered: dict[str, VarBinding] = {}
        for name, t in self.fields.items():
            ordered[name] = VarBinding(name, t, "field")
        for scope in self.scopes:
            for b in scope.values():
                ordered[b.name] = b
        self.visible_vars[id(stmt)] = tuple(ordered.values())

    def check_block(self, block: Block):
        self.record_scope(block)
        self.scopes.append({})
        for stmt in block.statements:
            self.check_stmt(stmt)
        self.scopes.pop()

    def check_stmt(self, stmt):
        self.record_scope(stmt)
        if isinstance(stmt, VarDecl):
            self.check_declared_type(stmt, stmt.type)
            if self.lookup_local(stmt.name) is not None or \
                    stmt.name in self.reserved:
                self.error(stmt, f"duplicate or reserved variable "
                                 f"'{stmt.name}'", "name-resolution")
            if stmt.init is not None:
                t = self.type_expr(stmt.init)
                self.check_assignable(stmt, stmt.type, t, "initializer")
            self.scopes[-1][stmt.name] = VarBinding(stmt.name, stmt.type,
                                                    "local")
        elif isinstance(stmt, Assign):
            self.check_assign(stmt)
        elif isinstance(stmt, If):
            self.check_cond(stmt.cond)
            self.check_block(stmt.then)
            if isinstance(stmt.orelse, Block):
                self.check_block(stmt.orelse)
            elif isinstance(stmt.orelse, If):
                self.check_stmt(stmt.orelse)
        elif isinstance(stmt, While):
            self.check_cond(stmt.cond)
            self.check_block(stmt.body)
        elif isinstance(stmt, DoWhile):
            self.check_block(stmt.body)
            self.check_cond(stmt.cond)
        elif isinstance(stmt, Return):
            self.check_return(stmt)
        elif isinstance(stmt, ExprStmt):
            if not (isinstance(stmt.expr, Call)
                    or (isinstance(stmt.expr, Unary)
                        and stmt.expr.op in ("++", "--"))):
                self.error(stmt, "not a statement (only calls and prefix "
                                 "++/-- may stand alone)", "type")
            self.type_expr(stmt.expr)
        elif isinstance(stmt, Block):
            self.check_block(stmt)

    def check_cond(self, cond):
        t = self.type_expr(cond)
        if t is not None and t != BOOLEAN:
            self.error(cond, f"condition must be boolean, got '{t}'", "type")

    def check_return(self, stmt: Return):
        ret = self.method.ret_type
        if stmt.value is None:
            if ret.name != "void":
                self.error(stmt, f"missing return value in method "
                                 f"'{self.method.name}'", "type")
            return
        t = self.type_expr(stmt.value)
        if ret.name == "void":
            self.error(stmt, f"void method '{self.method.name}' cannot "
                             f"return a value", "type")
        else:
            self.check_assignable(stmt, ret, t, "return value")

    def check_assign(self, stmt: Assign):
        if not isinstance(stmt.target, (Name, FieldAccess, Index)):
            self.error(stmt, "invalid assignment target", "type")
            self.type_expr(stmt.value)
            return
        target_t = self.type_expr(stmt.target)
        value_t = self.type_expr(stmt.value)
        if stmt.op == "=":
            self.check_assignable(stmt, target_t, value_t, "assignment")
        else:
            # augmented assignment is int-only
            if target_t is not None and target_t != INT:
                self.error(stmt, f"operator '{stmt.op}' needs an int target, "
                                 f"got '{target_t}'", "type")
            elif value_t is not None and value_t != INT:
                self.error(stmt, f"operator '{stmt.op}' needs an int operand, "
                                 f"got '{value_t}'", "type")

    def check_assignable(self, node, target_t, value_t, what: str):
        if target_t is None or value_t is None:
            return
        if value_t == NULL_T:
            if not _is_reference(target_t):
                self.error(node, f"null cannot initialize '{target_t}'",
                           "type")
            return
        if target_t != value_t:
            self.error(node, f"{what} type mismatch: expected '{target_t}', "
                             f"got '{value_t}'", "type")

    # ------------------------------------------------------------
    # expressions
    # ------------------------------------------------------------

    def lookup_local(self, name: str) -> VarBinding | None:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    def type_expr(self, expr, as_receiver: bool = False) -> TypeRef | None:
        t = self._type_expr(expr, as_receiver)
        if t is not None:
            self.expr_types[id(expr)] = t
        return t

    def _type_expr(self, expr, as_receiver: bool) -> TypeRef | None:
        if isinstance(expr, IntLit):
            if expr.value > INT_MAX:
                self.error(expr, f"integer literal {expr.value} out of range",
                           "type")
                return None
            return INT
        if isinstance(expr, BoolLit):
            return BOOLEAN
        if isinstance(expr, StrLit):
            return STRING
        if isinstance(expr, NullLit):
            return NULL_T
        if isinstance(expr, Name):
            binding = self.lookup_local(expr.ident)
            if binding is not None:
                return binding.type
            if expr.ident in self.fields:
                return self.fields[expr.ident]
            self.error(expr, f"undeclared name '{expr.ident}'",
                       "name-resolution")
            return None
        if isinstance(expr, TypeName):
            if expr.ident == "Math":
                if not as_receiver:
                    self.error(expr, "'Math' is not a value",
                               "name-resolution")
                    return None
                return TypeRef("Math")
            # a declared class name denotes the class singleton
            return TypeRef(expr.ident)
        if isinstance(expr, Unary):
            return self._type_unary(expr)
        if isinstance(expr, Binary):
            return self._type_binary(expr)
        if isinstance(expr, FieldAccess):
            return self._type_field_access(expr)
        if isinstance(expr, Call):
            return self._type_call(expr)
        if isinstance(expr, Index):
            return self._type_index(expr)
        raise TypeError(f"unknown expression {expr!r}")  # pragma: no cover

    def _type_unary(self, expr: Unary) -> TypeRef | None:
        t = self.type_expr(expr.operand)
        if expr.op == "!":
            if t is not None and t != BOOLEAN:
                self.error(expr, f"'!' needs a boolean operand, got '{t}'",
                           "type")
                return None
            return BOOLEAN
        if expr.op == "-":
            if t is not None and t != INT:
                self.error(expr, f"unary '-' needs an int operand, got '{t}'",
                           "type")
                return None
            return INT
        # ++ / -- need an int lvalue
        if not isinstance(expr.operand, (Name, FieldAccess, Index)):
            self.error(expr, f"'{expr.op}' needs a variable operand", "type")
            return None
        if t is not None and t != INT:
            self.error(expr, f"'{expr.op}' needs an int operand, got '{t}'",
                       "type")
            return None
        return INT

    def _type_binary(self, expr: Binary) -> TypeRef | None:
        lt = self.type_expr(expr.left)
        rt = self.type_expr(expr.right)
        op = expr.op
        if lt is None or rt is None:
            return None
        if op == "+" and (lt == STRING or rt == STRING):
            # Java-style concatenation; both sides must be printable scalars
            concatable = (STRING, INT, BOOLEAN)
            if lt in concatable and rt in concatable:
                return STRING
            self.error(expr, f"operator '+' cannot concatenate '{lt}' and "
                             f"'{rt}'", "type")
            return None
        if op in ("+", "-", "*", "/", "%"):
            if lt == INT and rt == INT:
                return INT
            self.error(expr, f"operator '{op}' cannot combine '{lt}' and "
                             f"'{rt}'", "type")
            return None
        if op in ("<", "<=", ">", ">="):
            if lt == INT and rt == INT:
                return BOOLEAN
            self.error(expr, f"operator '{op}' needs int operands, got "
                             f"'{lt}' and '{rt}'", "type")
            return None
        if op in ("&&", "||"):
            if lt == BOOLEAN and rt == BOOLEAN:
                return BOOLEAN
            self.error(expr, f"operator '{op}' needs boolean operands, got "
                             f"'{lt}' and '{rt}'", "type")
            return None
        # == / !=
        if lt == rt and lt != NULL_T:
            return BOOLEAN
        if (lt == NULL_T and _is_reference(rt)) or \
                (rt == NULL_T and _is_reference(lt)) or \
                (lt == NULL_T and rt == NULL_T):
            return BOOLEAN
        self.error(expr, f"operator '{op}' cannot compare '{lt}' and '{rt}'",
                   "type")
        return None

    def _type_field_access(self, expr: FieldAccess) -> TypeRef | None:
        rt = self.type_expr(expr.receiver, as_receiver=True)
        if rt is None:
            return None
        if rt.name == "Math":
            self.error(expr, "'Math' has no fields", "name-resolution")
            return None
        if rt.is_array or rt.name in PRIMITIVE_TYPES:
            self.error(expr, f"type '{rt}' has no fields", "type")
            return None
        cls = self.classes.get(rt.name)
        if cls is None:
            return None
        for f in cls.fields:
            if f.name == expr.name:
                return f.type
        self.error(expr, f"class '{rt.name}' has no field '{expr.name}'",
                   "name-resolution")
        return None

    def _type_call(self, expr: Call) -> TypeRef | None:
        arg_ts = [self.type_expr(a) for a in expr.args]
        if expr.receiver is None:
            owner = self.cls.name
            table = {m.name: m for m in self.cls.methods}
        else:
            rt = self.type_expr(expr.receiver, as_receiver=True)
            if rt is None:
                return None
            if rt.name == "Math":
                return self._type_math_call(expr, arg_ts)
            if rt.is_array or rt.name in PRIMITIVE_TYPES:
                self.error(expr, f"type '{rt}' has no methods", "type")
                return None
            cls = self.classes.get(rt.name)
            if cls is None:
                return None
            owner = cls.name
            table = {m.name: m for m in cls.methods}
        m = table.get(expr.name)
        if m is None:
            self.error(expr, f"class '{owner}' has no method '{expr.name}'",
                       "name-resolution")
            return None
        if len(expr.args) != len(m.params):
            self.error(expr, f"method '{expr.name}' expects "
                             f"{len(m.params)} argument(s), got "
                             f"{len(expr.args)}", "type")
            return m.ret_type if m.ret_type.name != "void" else VOID
        for arg, at, p in zip(expr.args, arg_ts, m.params):
            if at is None:
                continue
            if at == NULL_T:
                if not _is_reference(p.type):
                    self.error(arg, f"null cannot bind parameter "
                                    f"'{p.name}'", "type")
            elif at != p.type:
                self.error(arg, f"argument for '{p.name}' must be "
                                f"'{p.type}', got '{at}'", "type")
        return m.ret_type

    def _type_math_call(self, expr: Call, arg_ts) -> TypeRef | None:
        sig = MATH_METHODS.get(expr.name)
        if sig is None:
            self.error(expr, f"Math has no method '{expr.name}'",
                       "name-resolution")
            return None
        params, ret = sig
        if len(arg_ts) != len(params):
            self.error(expr, f"Math.{expr.name} expects {len(params)} "
                             f"argument(s), got {len(arg_ts)}", "type")
            return ret
        for arg, at, pt in zip(expr.args, arg_ts, params):
            if at is not None and at != pt:
                self.error(arg, f"Math.{expr.name} argument must be '{pt}', "
                                f"got '{at}'", "type")
        return ret

    def _type_index(self, expr: Index) -> TypeRef | None:
        at = self.type_expr(expr.array)
        it = self.type_expr(expr.index)
        if it is not None and it != INT:
            self.error(expr.index, f"array index must be int, got '{it}'",
                       "type")
        if at is None:
            return None
        if not at.is_array:
            self.error(expr, f"type '{at}' cannot be indexed", "type")
            return None
        return TypeRef(at.name, at.dims - 1)


def _is_reference(t: TypeRef) -> bool:
    return t.is_array or t == STRING or \
        (t.name not in ("int", "boolean", "void", "null") and not t.is_array)


def _definitely_returns(stmt) -> bool:
    if isinstance(stmt, Return):
        return True
    if isinstance(stmt, Block):
        return any(_definitely_returns(s) for s in stmt.statements)
    if isinstance(stmt, If):
        return (stmt.orelse is not None
                and _definitely_returns(stmt.then)
                and _definitely_returns(stmt.orelse))
    if isinstance(stmt, DoWhile):
        return _definitely_returns(stmt.body)
    return False
