import pytest

from mutalm.minij import LexError, TokenKind, tokenize
from mutalm.minij.lexer import join_lexemes

# ---------------------------------------------------------------
# worked examples
# ---------------------------------------------------------------

def test_simple_declaration():
    toks = tokenize("int a = 1;")
    assert [t.lexeme for t in toks] == ["int", "a", "=", "1", ";"]
    assert [t.kind for t in toks] == [
        TokenKind.KEYWORD, TokenKind.IDENT, TokenKind.OPERATOR,
        TokenKind.LITERAL, TokenKind.SEPARATOR,
    ]


def test_mask_is_one_token():
    toks = tokenize("a <mask> b")
    assert [t.lexeme for t in toks] == ["a", "<mask>", "b"]
    assert toks[1].kind is TokenKind.MASK


def test_mask_adjacent_to_equals():
    # the augmented-assignment mask slot: "res <mask>= a"
    toks = tokenize("res <mask>= a")
    assert [t.lexeme for t in toks] == ["res", "<mask>", "=", "a"]


def test_illegal_character():
    with pytest.raises(LexError) as err:
        tokenize("int a = @;")
    assert err.value.position == 8


# ---------------------------------------------------------------
# token inventory
# ---------------------------------------------------------------

ALL_OPERATORS = ["++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=",
                 "*=", "/=", "+", "-", "*", "/", "%", "<", ">", "=", "!"]
ALL_SEPARATORS = ["(", ")", "{", "}", "[", "]", ";", ",", "."]
KEYWORDS = ["class", "int", "boolean", "String", "void", "if", "else",
            "while", "do", "return"]
WORD_LITERALS = ["true", "false", "null"]


@pytest.mark.parametrize("op", ALL_OPERATORS)
def test_operator_lexes_whole(op):
    toks = tokenize(f"a {op} b")
    assert [t.lexeme for t in toks] == ["a", op, "b"]
    assert toks[1].kind is TokenKind.OPERATOR


@pytest.mark.parametrize("sep", ALL_SEPARATORS)
def test_separator(sep):
    (tok,) = tokenize(sep)
    assert tok.lexeme == sep
    assert tok.kind is TokenKind.SEPARATOR


@pytest.mark.parametrize("word", KEYWORDS)
def test_keyword(word):
    (tok,) = tokenize(word)
    assert tok.kind is TokenKind.KEYWORD


@pytest.mark.parametrize("word", WORD_LITERALS)
def test_word_literal(word):
    (tok,) = tokenize(word)
    assert tok.kind is TokenKind.LITERAL


def test_maximal_munch():
    assert [t.lexeme for t in tokenize("a<=b")] == ["a", "<=", "b"]
    assert [t.lexeme for t in tokenize("--a")] == ["--", "a"]
    assert [t.lexeme for t in tokenize("- -a")] == ["-", "-", "a"]
    assert [t.lexeme for t in tokenize("a<mask>b")] == ["a", "<mask>", "b"]


def test_string_literal_with_spaces_and_escapes():
    (tok,) = tokenize('"hello \\"there\\" \\n world"')
    assert tok.kind is TokenKind.LITERAL
    assert tok.lexeme == '"hello \\"there\\" \\n world"'


def test_comments_and_whitespace_skipped():
    toks = tokenize("a // trailing comment\n + b")
    assert [t.lexeme for t in toks] == ["a", "+", "b"]


# ---------------------------------------------------------------
# invariants
# ---------------------------------------------------------------

def test_spans_increasing_and_nonzero():
    toks = tokenize('class A { int f() { return "x" + 12; } }')
    assert all(t.span.length > 0 for t in toks)
    starts = [t.span.start for t in toks]
    assert starts == sorted(starts)
    assert len(set(starts)) == len(starts)


def test_byte_spans_with_multibyte_strings():
    text = 'x = "héllo";'
    toks = tokenize(text)
    data = text.encode("utf-8")
    for tok in toks:
        assert data[tok.span.start:tok.span.end].decode("utf-8") == tok.lexeme


@pytest.mark.parametrize("text", [
    "int a = 1;",
    "res <mask>= a + b",
    'class A { boolean g(String s) { return s == "a b\\tc"; } }',
    "arr[index + 1] * Math.random() && !done",
])
def test_single_space_join_relexes_identically(text):
    toks = tokenize(text)
    again = tokenize(join_lexemes(toks))
    assert [(t.kind, t.lexeme) for t in again] == \
        [(t.kind, t.lexeme) for t in toks]


def test_line_numbers():
    toks = tokenize("a\n b\n\n c")
    assert [t.line for t in toks] == [1, 2, 4]
