import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mutalm.minij import analyze, parse, render, render_expr, tokenize
from mutalm.minij.ast import Binary, DoWhile, If, Return, While, walk_stmts
from mutalm.seeding import (SeededCondition, collect_class_conditions,
                            condition_sites, is_null_check, rel_ops,
                            seed_with_conditions, seed_with_variables)
from helpers import wrap_stmts


def canonical(src):
    return parse(render(parse(src)))


def brute_force_conditions(unit, cls_index):
    """Independent enumeration: all if/while/do guards and boolean returns."""
    cls = unit.classes[cls_index]
    info = analyze(unit)
    out = []
    for method in cls.methods:
        for stmt in walk_stmts(method.body):
            if isinstance(stmt, (If, While, DoWhile)):
                out.append(stmt.cond)
            elif isinstance(stmt, Return) and stmt.value is not None:
                t = info.type_of(stmt.value)
                if t is not None and (t.name, t.dims) == ("boolean", 0):
                    out.append(stmt.value)
    return out


# ---------------------------------------------------------------
# condition discovery
# ---------------------------------------------------------------

COND_SRC = """
class A {
    int f(int a, int b, String p) {
        if (a == b) { return 1; }
        while (a > 0) { a -= 1; }
        if (p == null) { return 0; }
        do { a += 1; } while (a < 10); return a;
    }
    boolean g(int a) { return a != 3; }
}
class B {
    int h(int a) { if (a >= 5) { return a; } return 0; }
}
"""


def test_condition_sites_cover_all_four_statement_kinds():
    unit = canonical(COND_SRC)
    kinds = [kind for _c, _m, _s, kind, _e in condition_sites(unit)]
    assert kinds == ["if", "while", "if", "do", "return", "if"]


def test_non_boolean_returns_are_not_conditions():
    unit = canonical(COND_SRC)
    exprs = [render_expr(e) for _c, _m, _s, _k, e in condition_sites(unit)]
    assert "a" not in exprs  # "return a;" is int-valued


def test_null_check_detection():
    unit = canonical(COND_SRC)
    conds = brute_force_conditions(unit, 0)
    flags = [is_null_check(c) for c in conds]
    assert flags == [False, False, True, False, False]


def test_collect_excludes_self_nullchecks_and_other_classes():
    unit = canonical(COND_SRC)
    target = [e for _c, _m, _s, _k, e in condition_sites(unit)
              if render_expr(e) == "a == b"][0]
    s_e = collect_class_conditions(unit, target)
    assert [render_expr(e) for e in s_e] == ["a > 0", "a < 10", "a != 3"]


def test_collect_deduplicates_spelled_alike_conditions():
    src = wrap_stmts(
        "if (a > 0) { return 1; } if (a > 0) { return 2; }"
        " if (a > b) { return 3; } return 0;")
    unit = canonical(src)
    conds = [e for _c, _m, _s, _k, e in condition_sites(unit)]
    target = conds[2]  # a > b
    s_e = collect_class_conditions(unit, target)
    assert [render_expr(e) for e in s_e] == ["a > 0"]


def test_collect_excludes_conditions_spelled_like_the_target():
    src = wrap_stmts(
        "if (a > 0) { return 1; } while (a > 0) { a -= 1; } return a;")
    unit = canonical(src)
    conds = [e for _c, _m, _s, _k, e in condition_sites(unit)]
    assert collect_class_conditions(unit, conds[0]) == []


def test_collect_rejects_non_condition_target():
    unit = canonical(wrap_stmts("int x = a + b; return x;"))
    expr = unit.classes[0].methods[0].body.statements[0].init
    with pytest.raises(ValueError):
        collect_class_conditions(unit, expr)


# ---------------------------------------------------------------
# scheme 1
# ---------------------------------------------------------------

def conds_of(src):
    unit = canonical(src)
    return unit, [e for _c, _m, _s, _k, e in condition_sites(unit)]


def test_scheme1_count_is_eight_per_sibling():
    unit, conds = conds_of(COND_SRC)
    target = conds[0]
    s_e = collect_class_conditions(unit, target)
    cands = seed_with_conditions(target, s_e, statement_kind="if")
    assert len(cands) == 8 * len(s_e) == 24


def test_scheme1_empty_siblings():
    unit, conds = conds_of(wrap_stmts("if (a > b) { return 1; } return 0;"))
    assert seed_with_conditions(conds[0], []) == []


def test_scheme1_renders_the_paper_shape():
    unit, conds = conds_of(wrap_stmts(
        "if (a == b) { return 1; } if (a > 0) { return 2; } return 0;"))
    target = conds[0]
    s_e = collect_class_conditions(unit, target)
    texts = {c.new_condition_text for c in seed_with_conditions(target, s_e)}
    assert "a == b || a > 0" in texts
    assert "a == b && a > 0" in texts
    assert "a == b || !(a > 0)" in texts
    assert "!(a > 0) && a == b" in texts
    assert texts == {
        f"{t} {op} {s}"
        for t, s, op in [("a == b", s2, op) for s2 in ("a > 0", "!(a > 0)")
                         for op in ("&&", "||")]
    } | {
        f"{s} {op} {t}"
        for t, s, op in [("a == b", s2, op) for s2 in ("a > 0", "!(a > 0)")
                         for op in ("&&", "||")]
    }


def test_scheme1_brute_force_cross_product():
    unit, conds = conds_of(COND_SRC)
    target = conds[1]  # a > 0
    s_e = collect_class_conditions(unit, target)
    cands = seed_with_conditions(target, s_e, statement_kind="while")
    expected = set()
    for exp_s in s_e:
        s = render_expr(exp_s)
        for op in ("&&", "||"):
            for part in (s, f"!({s})"):
                expected.add(f"a > 0 {op} {part}")
                expected.add(f"{part} {op} a > 0")
    assert {c.new_condition_text for c in cands} == expected
    assert len(cands) == len(expected)
    assert all(c.statement_kind == "while" for c in cands)
    assert all(c.scheme == "class-conditions" for c in cands)


def test_no_candidate_equals_the_original_condition():
    unit, conds = conds_of(COND_SRC)
    for target in conds:
        try:
            s_e = collect_class_conditions(unit, target)
        except ValueError:
            continue
        original = tuple(t.lexeme for t in tokenize(render_expr(target)))
        for c in seed_with_conditions(target, s_e):
            seeded = tuple(t.lexeme for t in tokenize(c.new_condition_text))
            assert seeded != original


def test_mask_sites_cover_seeded_tokens_only():
    unit, conds = conds_of(wrap_stmts(
        "if (a == b) { return 1; } if (a > 0) { return 2; } return 0;"))
    target = conds[0]
    s_e = collect_class_conditions(unit, target)
    by_text = {c.new_condition_text: c for c in seed_with_conditions(target, s_e)}

    c = by_text["a == b || !(a > 0)"]
    toks = [t.lexeme for t in tokenize(c.new_condition_text)]
    # tokens: a == b || ! ( a > 0 )  → seeded sites skip the parentheses
    assert [toks[i] for i in c.mask_sites] == ["!", "a", ">", "0"]
    assert c.mask_sites == (4, 6, 7, 8)

    c = by_text["a > 0 && a == b"]
    toks = [t.lexeme for t in tokenize(c.new_condition_text)]
    assert [toks[i] for i in c.mask_sites] == ["a", ">", "0"]
    assert c.mask_sites == (0, 1, 2)


def test_seeded_condition_rejects_inconsistent_text():
    with pytest.raises(ValueError):
        SeededCondition("a", "b", "&&", False, "original-first",
                        "class-conditions", "if", "a || b", (2,),
                        None, 1)
    with pytest.raises(ValueError):
        SeededCondition("a", "b", "and", False, "original-first",
                        "class-conditions", "if", "a and b", (2,), None, 1)


# ---------------------------------------------------------------
# scheme 2
# ---------------------------------------------------------------

def first_if_condition(unit):
    for _c, _m, stmt, kind, expr in condition_sites(unit):
        if kind == "if":
            return stmt, expr
    raise AssertionError("no if condition")


def scope_at(unit, stmt):
    return analyze(unit).vars_at(stmt)


def test_scheme2_single_int_sibling_yields_24():
    src = ("class F { int numerator; int denominator;"
           " int f() { if (numerator == 0) { return 1; } return 0; } }")
    unit = canonical(src)
    stmt, expr = first_if_condition(unit)
    cands = seed_with_variables(expr, scope_at(unit, stmt))
    assert len(cands) == 24  # 6 rel ops x 2 orders x 2 logical ops
    texts = {c.new_condition_text for c in cands}
    assert "numerator == 0 && numerator < denominator" in texts
    assert "numerator != denominator || numerator == 0" in texts
    assert all(c.scheme == "variables" for c in cands)
    assert all(c.statement_kind == "if" for c in cands)
    assert all(not c.negated for c in cands)


def test_scheme2_boolean_sibling_yields_8():
    src = ("class F { boolean ready; boolean done;"
           " int f() { if (ready) { return 1; } return 0; } }")
    unit = canonical(src)
    stmt, expr = first_if_condition(unit)
    cands = seed_with_variables(expr, scope_at(unit, stmt))
    assert len(cands) == 8  # {==,!=} x 2 x 2
    assert {c.seeded_expr for c in cands} == {"ready == done",
                                              "ready != done"}


def test_scheme2_no_variables_in_condition():
    unit = canonical(wrap_stmts("if (true) { return 1; } return 0;"))
    stmt, expr = first_if_condition(unit)
    assert seed_with_variables(expr, scope_at(unit, stmt)) == []


def test_scheme2_brute_force_count():
    src = ("class F { int x; boolean flag; String s; String t; int y;"
           " int f(int z, boolean other) {"
           " if (x > z && flag) { return 1; } return 0; } }")
    unit = canonical(src)
    stmt, expr = first_if_condition(unit)
    scope = scope_at(unit, stmt)
    cands = seed_with_variables(expr, scope)

    # independent enumeration over (var_t in expr) x (same-type var_i)
    in_expr = ["x", "z", "flag"]
    types = {b.name: (b.type.name, b.type.dims) for b in scope}
    expected = 0
    for var_t in in_expr:
        for var_i in types:
            if var_i == var_t or types[var_i] != types[var_t]:
                continue
            n_rel = 6 if types[var_t] == ("int", 0) else 2
            expected += n_rel * 2 * 2
    assert expected == (2 * 6 * 4) + (2 * 6 * 4) + (1 * 2 * 4)
    assert len(cands) == expected


def test_scheme2_seeded_var_t_comes_first():
    src = ("class F { int a; int b;"
           " int f() { if (a == 0) { return 1; } return 0; } }")
    unit = canonical(src)
    stmt, expr = first_if_condition(unit)
    for c in seed_with_variables(expr, scope_at(unit, stmt)):
        assert c.seeded_expr.startswith("a ")
        assert c.seeded_expr.endswith(" b")


def test_rel_ops_by_type():
    from mutalm.minij.ast import TypeRef
    assert rel_ops(TypeRef("int")) == ("<", "<=", ">", ">=", "==", "!=")
    assert rel_ops(TypeRef("boolean")) == ("==", "!=")
    assert rel_ops(TypeRef("String")) == ("==", "!=")
    assert rel_ops(TypeRef("int", 1)) == ("==", "!=")
    assert rel_ops(TypeRef("Node")) == ("==", "!=")


# ---------------------------------------------------------------
# property: the 8-per-sibling law on random fixtures
# ---------------------------------------------------------------

REL = st.sampled_from(["<", "<=", ">", ">=", "==", "!="])
VAR = st.sampled_from(["a", "b"])
LIT = st.integers(0, 9)


@st.composite
def condition_texts(draw):
    if draw(st.booleans()):
        return f"{draw(VAR)} {draw(REL)} {draw(LIT)}"
    return f"{draw(VAR)} {draw(REL)} null" if draw(st.booleans()) \
        else f"{draw(VAR)} {draw(REL)} {draw(VAR)}"


@settings(max_examples=60, deadline=None)
@given(st.lists(condition_texts(), min_size=1, max_size=6))
def test_seeding_count_law_on_random_fixtures(conds):
    conds = [c for c in conds if not c.endswith("null")
             or c.split()[1] in ("==", "!=")]
    if not conds:
        return
    body = "".join(f"if ({c}) {{ return 1; }} " for c in conds)
    src = ("class R { int f(int a, int b) { " + body + "return 0; } }")
    try:
        unit = canonical(src)
    except Exception:
        return
    from mutalm.minij import validate
    if not validate(unit).ok:
        return
    sites = [e for _c, _m, _s, _k, e in condition_sites(unit)]
    target = sites[0]

    # oracle: count distinct non-null-check spellings != target's spelling
    def norm(text):
        return tuple(t.lexeme for t in tokenize(text))

    target_text = render_expr(target)
    distinct = {norm(render_expr(e)) for e in sites[:len(conds)]
                if not is_null_check(e)} - {norm(target_text)}
    s_e = collect_class_conditions(unit, target)
    assert len(s_e) == len(distinct)
    cands = seed_with_conditions(target, s_e)
    assert len(cands) == 8 * len(s_e)
    assert len({c.new_condition_text for c in cands}) == len(cands)
