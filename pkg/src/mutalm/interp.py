"""Deterministic big-step interpreter for MiniJ programs.

Execution is metered: every statement and expression evaluation costs one
unit of fuel, and running out raises OutOfFuel so callers can report a
timeout verdict. All observable failure modes surface as MiniJError with a
stable error kind. Identical (program, entry, arguments, fuel) inputs give
identical results on every run: Math.random() draws from a fixed linear
congruential stream that restarts with each Interpreter.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field

from .minij.ast import (Assign, Binary, Block, BoolLit, Call, DoWhile,
                        ExprStmt, FieldAccess, If, Index, IntLit, MethodDecl,
                        Name, NullLit, Program, Return, StrLit, TypeName,
                        TypeRef, Unary, VarDecl, While)

DEFAULT_FUEL = 100_000
MAX_CALL_DEPTH = 200

INT_MIN = -(2 ** 63)
INT_MAX = 2 ** 63 - 1

ERROR_KINDS = frozenset({
    "division-by-zero",
    "null-dereference",
    "array-bounds",
    "overflow",
    "stack-overflow",
})

# Knuth's MMIX multiplier; the stream restarts at a fixed seed per run
_LCG_MULT = 6364136223846793005
_LCG_INC = 1442695040888963407
_LCG_SEED = 0x9E3779B97F4A7C15
_LCG_MASK = 2 ** 64 - 1


class MiniJError(Exception):
    """A MiniJ runtime failure with a stable, observable error kind."""

    def __init__(self, kind: str):
        assert kind in ERROR_KINDS, kind
        self.kind = kind
        super().__init__(kind)


class OutOfFuel(Exception):
    """The fuel budget ran out before the program finished."""


class _ReturnSignal(Exception):
    def __init__(self, value):
        self.value = value


class _Void:
    """Result of a void method; distinct from the MiniJ null (None)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "<void>"


VOID = _Void()


@dataclass(eq=False)
class Instance:
    """The singleton object behind one declared class."""

    class_name: str
    fields: dict = field(default_factory=dict)

    def __repr__(self):
        return f"<{self.class_name} singleton>"


class _Frame:
    """One activation record: the receiver plus a stack of block scopes."""

    __slots__ = ("instance", "scopes")

    def __init__(self, instance: Instance):
        self.instance = instance
        self.scopes: list[dict] = [{}]

    def lookup(self, name: str):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return self.instance.fields[name]

    def declare(self, name: str, value):
        self.scopes[-1][name] = value

    def store(self, name: str, value):
        for scope in reversed(self.scopes):
            if name in scope:
                scope[name] = value
                return
        self.instance.fields[name] = value


def default_value(t: TypeRef):
    """The value a declaration takes before any explicit initialization."""
    if t.is_array:
        return None
    if t.name == "int":
        return 0
    if t.name == "boolean":
        return False
    return None  # String, class references


def _check_int(value: int) -> int:
    if value < INT_MIN or value > INT_MAX:
        raise MiniJError("overflow")
    return value


def _div(a: int, b: int) -> int:
    if b == 0:
        raise MiniJError("division-by-zero")
    q = abs(a) // abs(b)
    return _check_int(q if (a >= 0) == (b >= 0) else -q)


def _rem(a: int, b: int) -> int:
    if b == 0:
        raise MiniJError("division-by-zero")
    return a - _div(a, b) * b  # result takes the dividend's sign


def _stringify(value) -> str:
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, int):
        return str(value)
    return value


def _same(left, right) -> bool:
    """MiniJ ==: by value for scalars and String, by identity for
    references and arrays."""
    if left is None or right is None:
        return left is None and right is None
    if isinstance(left, (Instance, list)) or isinstance(right,
                                                        (Instance, list)):
        return left is right
    return left == right


class Interpreter:
    """Evaluates a validated MiniJ program against a fixed fuel budget.

    One Interpreter corresponds to one test execution: class singletons
    are constructed (and their field initializers run) eagerly, and the
    Math.random stream starts from its fixed seed.
    """

    def __init__(self, unit: Program, fuel: int = DEFAULT_FUEL):
        if fuel < 1:
            raise ValueError("fuel must be positive")
        # each MiniJ activation costs a dozen Python frames; make sure the
        # MAX_CALL_DEPTH cap fires before Python's own recursion guard
        if sys.getrecursionlimit() < 12_000:
            sys.setrecursionlimit(12_000)
        self.fuel = fuel
        self.depth = 0
        self._rng_state = _LCG_SEED
        self.classes = {c.name: c for c in unit.classes}
        self.instances = {
            c.name: Instance(c.name, {f.name: default_value(f.type)
                                      for f in c.fields})
            for c in unit.classes
        }
        self._methods = {
            c.name: {m.name: m for m in c.methods} for c in unit.classes
        }
        for c in unit.classes:
            frame = _Frame(self.instances[c.name])
            for f in c.fields:
                if f.init is not None:
                    self.instances[c.name].fields[f.name] = \
                        self.eval(f.init, frame)

    # ------------------------------------------------------------
    # entry points
    # ------------------------------------------------------------

    def call(self, class_name: str, method_name: str, args: list):
        """Invoke a method on a class singleton; the harness entry point."""
        method = self._methods[class_name][method_name]
        return self._invoke(self.instances[class_name], method, list(args))

    def _invoke(self, instance: Instance, method: MethodDecl, args: list):
        if self.depth >= MAX_CALL_DEPTH:
            raise MiniJError("stack-overflow")
        self.depth += 1
        frame = _Frame(instance)
        for param, arg in zip(method.params, args):
            frame.scopes[0][param.name] = arg
        try:
            self.exec_block(method.body, frame)
        except _ReturnSignal as signal:
            return signal.value
        finally:
            self.depth -= 1
        return VOID

    # ------------------------------------------------------------
    # statements
    # ------------------------------------------------------------

    def _tick(self):
        self.fuel -= 1
        if self.fuel < 0:
            raise OutOfFuel()

    def exec_block(self, block: Block, frame: _Frame):
        frame.scopes.append({})
        try:
            for stmt in block.statements:
                self.exec_stmt(stmt, frame)
        finally:
            frame.scopes.pop()

    def exec_stmt(self, stmt, frame: _Frame):
        self._tick()
        if isinstance(stmt, VarDecl):
            value = (self.eval(stmt.init, frame) if stmt.init is not None
                     else default_value(stmt.type))
            frame.declare(stmt.name, value)
        elif isinstance(stmt, Assign):
            self._exec_assign(stmt, frame)
        elif isinstance(stmt, If):
            if self.eval(stmt.cond, frame):
                self.exec_block(stmt.then, frame)
            elif isinstance(stmt.orelse, Block):
                self.exec_block(stmt.orelse, frame)
            elif stmt.orelse is not None:  # else-if chain
                self.exec_stmt(stmt.orelse, frame)
        elif isinstance(stmt, While):
            while self.eval(stmt.cond, frame):
                self.exec_block(stmt.body, frame)
        elif isinstance(stmt, DoWhile):
            while True:
                self.exec_block(stmt.body, frame)
                if not self.eval(stmt.cond, frame):
                    break
        elif isinstance(stmt, Return):
            value = (self.eval(stmt.value, frame)
                     if stmt.value is not None else VOID)
            raise _ReturnSignal(value)
        elif isinstance(stmt, ExprStmt):
            self.eval(stmt.expr, frame)
        elif isinstance(stmt, Block):
            self.exec_block(stmt, frame)
        else:  # pragma: no cover
            raise TypeError(f"unknown statement {stmt!r}")

    def _exec_assign(self, stmt: Assign, frame: _Frame):
        target = stmt.target
        if stmt.op == "=":
            if isinstance(target, Name):
                frame.store(target.ident, self.eval(stmt.value, frame))
            elif isinstance(target, FieldAccess):
                recv = self._eval_receiver(target.receiver, frame)
                recv.fields[target.name] = self.eval(stmt.value, frame)
            else:
                array, index = self._eval_element(target, frame)
                array[index] = self.eval(stmt.value, frame)
            return
        op = stmt.op[0]  # one of + - * /
        if isinstance(target, Name):
            current = frame.lookup(target.ident)
            frame.store(target.ident,
                        self._arith(op, current, self.eval(stmt.value,
                                                           frame)))
        elif isinstance(target, FieldAccess):
            recv = self._eval_receiver(target.receiver, frame)
            current = recv.fields[target.name]
            recv.fields[target.name] = \
                self._arith(op, current, self.eval(stmt.value, frame))
        else:
            array, index = self._eval_element(target, frame)
            array[index] = self._arith(op, array[index],
                                       self.eval(stmt.value, frame))

    # ------------------------------------------------------------
    # expressions
    # ------------------------------------------------------------

    def eval(self, expr, frame: _Frame):
        self._tick()
        if isinstance(expr, IntLit):
            return expr.value
        if isinstance(expr, BoolLit):
            return expr.value
        if isinstance(expr, StrLit):
            return expr.value
        if isinstance(expr, NullLit):
            return None
        if isinstance(expr, Name):
            return frame.lookup(expr.ident)
        if isinstance(expr, TypeName):
            return self.instances[expr.ident]
        if isinstance(expr, Unary):
            return self._eval_unary(expr, frame)
        if isinstance(expr, Binary):
            return self._eval_binary(expr, frame)
        if isinstance(expr, FieldAccess):
            recv = self._eval_receiver(expr.receiver, frame)
            return recv.fields[expr.name]
        if isinstance(expr, Call):
            return self._eval_call(expr, frame)
        if isinstance(expr, Index):
            array, index = self._eval_element(expr, frame)
            return array[index]
        raise TypeError(f"unknown expression {expr!r}")  # pragma: no cover

    def _eval_receiver(self, receiver, frame: _Frame) -> Instance:
        value = self.eval(receiver, frame)
        if value is None:
            raise MiniJError("null-dereference")
        return value

    def _eval_element(self, expr, frame: _Frame):
        """Evaluate an Index node to its (array, bounds-checked index)."""
        array = self.eval(expr.array, frame)
        if array is None:
            raise MiniJError("null-dereference")
        index = self.eval(expr.index, frame)
        if index < 0 or index >= len(array):
            raise MiniJError("array-bounds")
        return array, index

    def _eval_unary(self, expr: Unary, frame: _Frame):
        if expr.op == "!":
            return not self.eval(expr.operand, frame)
        if expr.op == "-":
            return _check_int(-self.eval(expr.operand, frame))
        # prefix ++/--: update the lvalue and yield the new value
        delta = 1 if expr.op == "++" else -1
        target = expr.operand
        if isinstance(target, Name):
            value = _check_int(frame.lookup(target.ident) + delta)
            frame.store(target.ident, value)
            return value
        if isinstance(target, FieldAccess):
            recv = self._eval_receiver(target.receiver, frame)
            value = _check_int(recv.fields[target.name] + delta)
            recv.fields[target.name] = value
            return value
        array, index = self._eval_element(target, frame)
        value = _check_int(array[index] + delta)
        array[index] = value
        return value

    def _eval_binary(self, expr: Binary, frame: _Frame):
        op = expr.op
        if op == "&&":
            return (self.eval(expr.left, frame)
                    and self.eval(expr.right, frame))
        if op == "||":
            return (self.eval(expr.left, frame)
                    or self.eval(expr.right, frame))
        left = self.eval(expr.left, frame)
        right = self.eval(expr.right, frame)
        if op == "==":
            return _same(left, right)
        if op == "!=":
            return not _same(left, right)
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        if op == ">=":
            return left >= right
        if op == "+" and (isinstance(left, str) or isinstance(right, str)):
            return _stringify(left) + _stringify(right)
        return self._arith(op, left, right)

    def _arith(self, op: str, left: int, right: int) -> int:
        if op == "+":
            return _check_int(left + right)
        if op == "-":
            return _check_int(left - right)
        if op == "*":
            return _check_int(left * right)
        if op == "/":
            return _div(left, right)
        if op == "%":
            return _rem(left, right)
        raise ValueError(f"unknown operator {op!r}")  # pragma: no cover

    def _eval_call(self, expr: Call, frame: _Frame):
        if isinstance(expr.receiver, TypeName) and \
                expr.receiver.ident == "Math":
            args = [self.eval(a, frame) for a in expr.args]
            return self._math(expr.name, args)
        if expr.receiver is None:
            instance = frame.instance
        else:
            instance = self._eval_receiver(expr.receiver, frame)
        args = [self.eval(a, frame) for a in expr.args]
        method = self._methods[instance.class_name][expr.name]
        return self._invoke(instance, method, args)

    def _math(self, name: str, args: list):
        if name == "abs":
            return _check_int(abs(args[0]))
        if name == "max":
            return max(args[0], args[1])
        if name == "min":
            return min(args[0], args[1])
        # random: next draw from the fixed stream, in [0, 2**31)
        self._rng_state = \
            (self._rng_state * _LCG_MULT + _LCG_INC) & _LCG_MASK
        return self._rng_state >> 33
