"""Test execution harness: runs programs and mutants against JSON test
suites and assembles kill matrices.

A mutant is killed by a test when the pair's outcome is distinguishable
from the original program's outcome on that test: different verdict,
different returned value, or different runtime error kind. Message text
never participates. Matrix construction parallelizes across mutants and
reduces by mutant index, so worker count cannot change the result.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .interp import (DEFAULT_FUEL, INT_MAX, INT_MIN, VOID, Instance,
                     Interpreter, MiniJError, OutOfFuel)
from .minij import parse, validate
from .minij.ast import Program, TypeRef
from .schemas import (KILL_MATRIX_SCHEMA, SUITE_SCHEMA, SchemaError,
                      dump_json, load_json, validate_payload)


class SuiteInvalid(ValueError):
    """A test suite does not fit the program under test."""


@dataclass(frozen=True)
class TestCase:
    """One test: call entry ("Class.method") with args, check expectation.

    expect is ("value", v) with v a JSON-style value (scalar or list of
    scalars), or ("error", kind) naming an expected runtime error.
    """

    __test__ = False  # keep pytest from collecting this as a test class

    name: str
    entry: str
    args: tuple
    expect: tuple

    def __post_init__(self):
        if "." not in self.entry:
            raise SuiteInvalid(f"entry '{self.entry}' is not Class.method")
        if self.expect[0] not in ("value", "error"):
            raise SuiteInvalid(f"unknown expectation {self.expect!r}")
        # freeze nested values so executions can never share state
        object.__setattr__(self, "args", _freeze(tuple(self.args)))
        object.__setattr__(self, "expect",
                           (self.expect[0], _freeze(self.expect[1])))


@dataclass(frozen=True)
class TestOutcome:
    """The observable result of one (program, test) execution."""

    __test__ = False

    verdict: str  # pass | fail-value | runtime-error | timeout
    actual: tuple | None = None  # observable value for pass / fail-value
    error_kind: str | None = None

    @property
    def key(self) -> tuple:
        """Comparison key: two outcomes kill-differ iff keys differ."""
        return (self.verdict, self.actual, self.error_kind)


def observable(value) -> tuple:
    """Canonical cross-run encoding of a MiniJ value.

    Class singletons are fresh objects in every run, so they are observed
    by class name; arrays are observed by contents.
    """
    if value is VOID:
        return ("void",)
    if value is None:
        return ("null",)
    if value is True or value is False:
        return ("boolean", value)
    if isinstance(value, int):
        return ("int", value)
    if isinstance(value, str):
        return ("String", value)
    if isinstance(value, list):
        return ("array", tuple(observable(v) for v in value))
    if isinstance(value, Instance):
        return ("object", value.class_name)
    raise TypeError(f"not a MiniJ value: {value!r}")  # pragma: no cover


def _expected(value) -> tuple:
    """Encode a JSON expectation value the same way as observable()."""
    if value is None:
        return ("null",)
    if value is True or value is False:
        return ("boolean", value)
    if isinstance(value, int):
        return ("int", value)
    if isinstance(value, str):
        return ("String", value)
    return ("array", tuple(_expected(v) for v in value))


# ------------------------------------------------------------
# suites
# ------------------------------------------------------------

def suite_from_payload(payload) -> list[TestCase]:
    validate_payload(payload, SUITE_SCHEMA, "test suite")
    tests = []
    for t in payload["tests"]:
        exp = t["expect"]
        expect = (("value", _freeze(exp["value"])) if "value" in exp
                  else ("error", exp["error"]))
        tests.append(TestCase(t["name"], t["entry"], _freeze(t["args"]),
                              expect))
    names = [t.name for t in tests]
    if len(set(names)) != len(names):
        raise SuiteInvalid("duplicate test names in suite")
    return tests


def load_suite(path) -> list[TestCase]:
    return suite_from_payload(load_json(path))


def _freeze(value):
    if isinstance(value, (list, tuple)):
        return tuple(_freeze(v) for v in value)
    return value


def _thaw(value):
    """Fresh mutable runtime value for one execution."""
    if isinstance(value, tuple):
        return [_thaw(v) for v in value]
    return value


def _arg_matches(value, t: TypeRef) -> bool:
    if t.is_array:
        return value is None or (
            isinstance(value, tuple)
            and all(_arg_matches(v, TypeRef(t.name)) for v in value))
    if t.name == "int":
        return (isinstance(value, int) and not isinstance(value, bool)
                and INT_MIN <= value <= INT_MAX)
    if t.name == "boolean":
        return isinstance(value, bool)
    if t.name == "String":
        return value is None or isinstance(value, str)
    return value is None  # class references: only null is expressible


def resolve_entry(program: Program, test: TestCase):
    """Find the entry method, checking arity and argument types."""
    class_name, method_name = test.entry.split(".", 1)
    cls = next((c for c in program.classes if c.name == class_name), None)
    if cls is None:
        raise SuiteInvalid(f"test '{test.name}': no class '{class_name}'")
    method = next((m for m in cls.methods if m.name == method_name), None)
    if method is None:
        raise SuiteInvalid(f"test '{test.name}': class '{class_name}' has "
                           f"no method '{method_name}'")
    if len(method.params) != len(test.args):
        raise SuiteInvalid(
            f"test '{test.name}': {test.entry} takes {len(method.params)} "
            f"arguments, got {len(test.args)}")
    for param, arg in zip(method.params, test.args):
        if not _arg_matches(arg, param.type):
            raise SuiteInvalid(
                f"test '{test.name}': argument '{param.name}' expects "
                f"{param.type}, got {arg!r}")
    return class_name, method_name


# ------------------------------------------------------------
# execution
# ------------------------------------------------------------

def run_test(program: Program, test: TestCase,
             fuel: int = DEFAULT_FUEL) -> TestOutcome:
    """Execute one test; every failure mode is a verdict, never a raise."""
    class_name, method_name = resolve_entry(program, test)
    try:
        interp = Interpreter(program, fuel)
        result = interp.call(class_name, method_name,
                             [_thaw(a) for a in test.args])
    except MiniJError as err:
        if test.expect == ("error", err.kind):
            return TestOutcome("pass", error_kind=err.kind)
        return TestOutcome("runtime-error", error_kind=err.kind)
    except OutOfFuel:
        return TestOutcome("timeout")
    actual = observable(result)
    if test.expect[0] == "value" and actual == _expected(test.expect[1]):
        return TestOutcome("pass", actual=actual)
    return TestOutcome("fail-value", actual=actual)


# ------------------------------------------------------------
# kill matrices
# ------------------------------------------------------------

@dataclass(frozen=True)
class KillMatrix:
    mutant_ids: tuple
    test_names: tuple
    kills: tuple  # kills[mutant][test] -> bool
    revealing_tests: tuple
    approach: str = ""

    def __post_init__(self):
        if len(self.kills) != len(self.mutant_ids):
            raise ValueError("kill matrix row count != mutant count")
        for row in self.kills:
            if len(row) != len(self.test_names):
                raise ValueError("kill matrix column count != test count")
        unknown = set(self.revealing_tests) - set(self.test_names)
        if unknown:
            raise ValueError(f"revealing tests not in suite: {unknown}")

    def killers_for(self, mutant_index: int) -> tuple:
        """Indices of the tests that kill the given mutant."""
        return tuple(t for t, killed
                     in enumerate(self.kills[mutant_index]) if killed)

    @property
    def mutation_score(self) -> float | None:
        """Killed over total; None when the mutant set is empty."""
        if not self.mutant_ids:
            return None
        killed = sum(1 for row in self.kills if any(row))
        return killed / len(self.mutant_ids)

    def relabel(self, approach: str) -> "KillMatrix":
        return KillMatrix(self.mutant_ids, self.test_names, self.kills,
                          self.revealing_tests, approach)


def _mutant_items(mutants) -> list[tuple[str, str]]:
    """Normalize to (id, source text) pairs.

    Accepts a generated mutant set, a list of mutants, or raw pairs.
    """
    seq = getattr(mutants, "mutants", mutants)
    items = []
    for m in seq:
        if isinstance(m, tuple):
            items.append(m)
        else:
            items.append((m.id, m.rendered_source))
    return items


def _outcome_row(source: str, suite: list[TestCase],
                 fuel: int) -> list[TestOutcome]:
    program = parse(source)
    report = validate(program)
    if not report.ok:
        raise ValueError(f"program does not validate: "
                         f"{report.diagnostics[0].message}")
    return [run_test(program, test, fuel) for test in suite]


def build_kill_matrix(original: Program, mutants, suite: list[TestCase],
                      buggy: Program | None = None,
                      fuel: int = DEFAULT_FUEL, jobs: int | None = None,
                      approach: str = "") -> KillMatrix:
    """Run original, mutants, and the optional buggy version; diff outcomes.

    revealing_tests are the suite tests that do not pass on the buggy
    version (empty when no buggy version is supplied).
    """
    report = validate(original)
    if not report.ok:
        raise ValueError("original program does not validate")
    for test in suite:
        resolve_entry(original, test)
    base = [run_test(original, test, fuel) for test in suite]

    items = _mutant_items(mutants)
    workers = jobs if jobs and jobs > 0 else (os.cpu_count() or 1)
    if workers == 1 or not items:
        rows = [_outcome_row(source, suite, fuel) for _, source in items]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_outcome_row, source, suite, fuel)
                       for _, source in items]
            rows = [f.result() for f in futures]  # reduce by mutant index

    kills = tuple(
        tuple(row[t].key != base[t].key for t in range(len(suite)))
        for row in rows)

    revealing: tuple = ()
    if buggy is not None:
        if not validate(buggy).ok:
            raise ValueError("buggy program does not validate")
        for test in suite:
            resolve_entry(buggy, test)
        revealing = tuple(
            test.name for test in suite
            if run_test(buggy, test, fuel).verdict != "pass")

    return KillMatrix(tuple(mid for mid, _ in items),
                      tuple(t.name for t in suite), kills, revealing,
                      approach)


# ------------------------------------------------------------
# persistence
# ------------------------------------------------------------

def save_kill_matrix(matrix: KillMatrix, path):
    dump_json({
        "mutants": list(matrix.mutant_ids),
        "tests": list(matrix.test_names),
        "kills": [list(row) for row in matrix.kills],
        "revealing_tests": list(matrix.revealing_tests),
        "approach": matrix.approach,
    }, path)


def matrix_from_payload(payload, source: str = "kill matrix") -> KillMatrix:
    validate_payload(payload, KILL_MATRIX_SCHEMA, source)
    mutants = payload["mutants"]
    tests = payload["tests"]
    if len(set(mutants)) != len(mutants):
        raise SchemaError(f"{source}: duplicate mutant ids", "$.mutants")
    if len(set(tests)) != len(tests):
        raise SchemaError(f"{source}: duplicate test names", "$.tests")
    if len(payload["kills"]) != len(mutants):
        raise SchemaError(f"{source}: expected {len(mutants)} kill rows, "
                          f"found {len(payload['kills'])}", "$.kills")
    for i, row in enumerate(payload["kills"]):
        if len(row) != len(tests):
            raise SchemaError(f"{source}: expected {len(tests)} entries, "
                              f"found {len(row)}", f"$.kills[{i}]")
    missing = set(payload["revealing_tests"]) - set(tests)
    if missing:
        raise SchemaError(f"{source}: revealing tests not in tests: "
                          f"{sorted(missing)}", "$.revealing_tests")
    return KillMatrix(tuple(mutants), tuple(tests),
                      tuple(tuple(row) for row in payload["kills"]),
                      tuple(payload["revealing_tests"]),
                      payload.get("approach", ""))


def load_kill_matrix(path) -> KillMatrix:
    return matrix_from_payload(load_json(path), str(path))
