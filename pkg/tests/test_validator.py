import pytest

from mutalm.minij import analyze, check_source, parse, validate
from mutalm.minij.ast import TypeRef
from helpers import wrap_stmts


def cats(report):
    return [d.category for d in report.diagnostics]


def messages(report):
    return " | ".join(d.message for d in report.diagnostics)


# ---------------------------------------------------------------
# acceptance
# ---------------------------------------------------------------

VALID_SOURCES = [
    wrap_stmts("return a + b;"),
    wrap_stmts("int x = 0; while (x < a) { x += 1; } return x;"),
    wrap_stmts("if (a > b) { return a; } return b;"),
    wrap_stmts("do { a -= 1; } while (a > 0); return a;"),
    wrap_stmts("return Math.max(Math.abs(a), b);"),
    wrap_stmts('String s; if (s == null) { return 0; } return 1;'),
    wrap_stmts("int[] xs; return xs[a];"),
    "class A { void v(int a) { if (a > 0) { return; } } }",
    "class Node { Node next; int size;"
    " int len() { Node cur; cur = Node; return cur.size; } }",
    wrap_stmts('String s = "x" + 1; return a;'),
    wrap_stmts("boolean t = a == b || !(a != b); return 0;"),
]


@pytest.mark.parametrize("src", VALID_SOURCES)
def test_valid_programs_pass(src):
    report = validate(parse(src))
    assert report.ok, messages(report)


# ---------------------------------------------------------------
# name resolution
# ---------------------------------------------------------------

def test_undeclared_name():
    report = validate(parse(wrap_stmts("return missing;")))
    assert not report.ok
    assert cats(report) == ["name-resolution"]
    assert "missing" in messages(report)


def test_duplicate_local():
    report = validate(parse(wrap_stmts("int a = 1; return a;")))
    assert "name-resolution" in cats(report)  # 'a' already bound as a param


def test_shadowing_in_nested_block_is_rejected():
    src = wrap_stmts("int x = 1; if (a > 0) { int x = 2; return x; } return x;")
    report = validate(parse(src))
    assert "name-resolution" in cats(report)


def test_unknown_field():
    src = "class Node { int size; int f(Node n) { return n.len; } }"
    report = validate(parse(src))
    assert cats(report) == ["name-resolution"]


def test_unknown_method():
    report = validate(parse(wrap_stmts("return g(a);")))
    assert cats(report) == ["name-resolution"]


def test_reserved_class_name():
    report = validate(parse("class Math { int f() { return 1; } }"))
    assert "name-resolution" in cats(report)


def test_local_shadowing_class_name_is_rejected():
    src = "class Node { int f() { int Node = 1; return Node; } }"
    report = validate(parse(src))
    assert "name-resolution" in cats(report)


# ---------------------------------------------------------------
# types
# ---------------------------------------------------------------

def test_int_plus_boolean():
    report = validate(parse(wrap_stmts("return 1 + true;")))
    assert cats(report) == ["type"]


def test_condition_must_be_boolean():
    report = validate(parse(wrap_stmts("if (a + b) { return 1; } return 0;")))
    assert cats(report) == ["type"]


def test_assignment_type_mismatch():
    report = validate(parse(wrap_stmts("boolean t; t = 3; return a;")))
    assert cats(report) == ["type"]


def test_augmented_assignment_is_int_only():
    report = validate(parse(wrap_stmts('String s = "x"; s += "y"; return a;')))
    assert cats(report) == ["type"]


def test_return_type_mismatch():
    report = validate(parse(wrap_stmts("return true;")))
    assert cats(report) == ["type"]


def test_void_return_with_value():
    report = validate(parse("class A { void v() { return 1; } }"))
    assert cats(report) == ["type"]


def test_string_concat_mixes_scalars_only():
    # Java-style: + with a String side concatenates int/boolean/String
    report = validate(parse(wrap_stmts('String s = 1 + "x"; return a;')))
    assert report.ok
    report = validate(parse(wrap_stmts('String s = 1 - "x"; return a;')))
    assert cats(report) == ["type"]
    src = wrap_stmts('String s; String t = s + null; return a;')
    assert cats(validate(parse(src))) == ["type"]


def test_null_comparison_needs_reference_operand():
    report = validate(parse(wrap_stmts("return a == null;", ret="boolean")))
    assert cats(report) == ["type"]


def test_reference_equality_between_classes():
    src = ("class Node { Node next; }"
           " class A { boolean f(Node n) { return n == n.next; } }")
    assert validate(parse(src)).ok


def test_string_relational_comparison_rejected():
    src = wrap_stmts('String s; return s < "a";', ret="boolean")
    report = validate(parse(src))
    assert cats(report) == ["type"]


def test_increment_requires_int_lvalue():
    report = validate(parse(wrap_stmts("boolean t; ++t; return a;")))
    assert cats(report) == ["type"]
    report = validate(parse(wrap_stmts("++5; return a;")))
    assert not report.ok


def test_array_index_must_be_int():
    report = validate(parse(wrap_stmts("int[] xs; return xs[true];")))
    assert cats(report) == ["type"]


def test_indexing_non_array():
    report = validate(parse(wrap_stmts("return a[0];")))
    assert cats(report) == ["type"]


def test_int_literal_out_of_range():
    report = validate(parse(wrap_stmts("return 9223372036854775808;")))
    assert cats(report) == ["type"]
    assert validate(parse(wrap_stmts("return 9223372036854775807;"))).ok


# ---------------------------------------------------------------
# structure
# ---------------------------------------------------------------

def test_all_paths_must_return():
    src = wrap_stmts("if (a > 0) { return 1; }")
    report = validate(parse(src))
    assert cats(report) == ["type"]
    assert "return" in messages(report)


def test_while_does_not_count_as_returning():
    src = wrap_stmts("while (true) { a += 1; }")
    report = validate(parse(src))
    assert cats(report) == ["type"]


def test_do_while_body_return_counts():
    assert validate(parse(wrap_stmts("do { return a; } while (true);"))).ok


def test_expression_statement_restriction():
    report = validate(parse(wrap_stmts("a + b; return a;")))
    assert cats(report) == ["type"]


def test_call_statement_allowed():
    src = ("class A { void log(int a) { if (a > 0) { return; } }"
           " int f(int a) { log(a); return a; } }")
    assert validate(parse(src)).ok


def test_math_requires_receiver_use():
    report = validate(parse(wrap_stmts("return Math;", ret="int")))
    assert not report.ok


def test_math_unknown_method():
    report = validate(parse(wrap_stmts("return Math.floor(a);")))
    assert cats(report) == ["name-resolution"]


def test_math_arity_checked():
    report = validate(parse(wrap_stmts("return Math.max(a);")))
    assert not report.ok
    report = validate(parse(wrap_stmts("return Math.random();")))
    assert report.ok


def test_mask_token_fails_with_parse_category():
    report = check_source(wrap_stmts("int x = <mask>;"))
    assert not report.ok
    assert cats(report) == ["parse"]


def test_lex_failure_categorised_as_parse():
    report = check_source("class A { int f() { return 1 @ 2; } }")
    assert not report.ok
    assert cats(report) == ["parse"]


# ---------------------------------------------------------------
# report determinism / analysis facts
# ---------------------------------------------------------------

def test_diagnostics_sorted_by_position():
    src = wrap_stmts("return missing1 + missing2;")
    report = validate(parse(src))
    starts = [d.span.start for d in report.diagnostics]
    assert starts == sorted(starts)
    assert len(report.diagnostics) == 2


def test_analysis_exposes_expression_types():
    src = wrap_stmts("int x = a * 2; return x + b;")
    unit = parse(src)
    info = analyze(unit)
    assert info.report.ok
    ret = unit.classes[0].methods[0].body.statements[1]
    assert info.type_of(ret.value) == TypeRef("int")


def test_analysis_exposes_visible_vars_in_order():
    src = wrap_stmts("int x = 0; if (a > 0) { int y = 1; x = y; } return x;")
    unit = parse(src)
    info = analyze(unit)
    method = unit.classes[0].methods[0]
    inner = method.body.statements[1].then.statements[1]
    names = [v.name for v in info.vars_at(inner)]
    assert names == ["a", "b", "x", "y"]
