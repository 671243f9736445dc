"""Recursive-descent parser for MiniJ.

Grammar (EBNF) lives in docs/minij-grammar.md. Class names are collected in
a pre-scan so an identifier in expression position that names a class (or
the built-in Math) parses as TypeName rather than Name.
"""
from __future__ import annotations

from .ast import (Assign, Binary, Block, BoolLit, Call, ClassDecl, DoWhile,
                  ExprStmt, FieldAccess, FieldDecl, If, Index, IntLit,
                  MethodDecl, Name, NullLit, Param, Program, Return, Span,
                  StrLit, TypeName, TypeRef, Unary, VarDecl, While)
from .lexer import Token, TokenKind, tokenize

BUILTIN_TYPE_NAMES = frozenset({"Math"})

ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/="})

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


class ParseError(Exception):
    """Raised on malformed input; carries position and the expected set."""

    def __init__(self, message: str, position: int, line: int,
                 expected: frozenset[str] = frozenset(), found: str = ""):
        super().__init__(f"{message} at byte {position} (line {line})")
        self.position = position
        self.line = line
        self.expected = expected
        self.found = found


def parse(text: str, tokens: list[Token] | None = None) -> Program:
    """Parse MiniJ source text into a Program. Raises ParseError/LexError.

    Callers that already lexed the text may pass its token list to skip
    the second scan; the tokens must come from this exact text.
    """
    if tokens is None:
        tokens = tokenize(text)
    return _Parser(tokens, len(text.encode("utf-8"))).parse_program()


class _Parser:
    def __init__(self, tokens: list[Token], end_pos: int):
        self.tokens = tokens
        self.pos = 0
        self.end_pos = end_pos
        # Pre-scan: names declared with the class keyword, plus builtins.
        declared = {tokens[i + 1].lexeme
                    for i in range(len(tokens) - 1)
                    if tokens[i].lexeme == "class"
                    and tokens[i].kind is TokenKind.KEYWORD
                    and tokens[i + 1].kind is TokenKind.IDENT}
        self.type_names = declared | set(BUILTIN_TYPE_NAMES)

    # ------------------------------------------------------------
    # token plumbing
    # ------------------------------------------------------------

    def peek(self, offset: int = 0) -> Token | None:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def at(self, lexeme: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.lexeme == lexeme

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.end_pos,
                             self._last_line(), found="<eof>")
        self.pos += 1
        return tok

    def expect(self, lexeme: str) -> Token:
        tok = self.peek()
        if tok is None or tok.lexeme != lexeme:
            self._fail(frozenset({lexeme}))
        return self.advance()

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok is None or tok.kind is not TokenKind.IDENT:
            self._fail(frozenset({"<identifier>"}))
        return self.advance()

    def _last_line(self) -> int:
        return self.tokens[-1].line if self.tokens else 1

    def _fail(self, expected: frozenset[str]):
        tok = self.peek()
        if tok is None:
            raise ParseError(f"expected {_fmt(expected)}, found end of input",
                             self.end_pos, self._last_line(),
                             expected=expected, found="<eof>")
        raise ParseError(f"expected {_fmt(expected)}, found {tok.lexeme!r}",
                         tok.span.start, tok.line, expected=expected,
                         found=tok.lexeme)

    def _span_from(self, start_tok: Token, end_tok: Token) -> Span:
        return Span(start_tok.span.start, end_tok.span.end - start_tok.span.start)

    # ------------------------------------------------------------
    # declarations
    # ------------------------------------------------------------

    def parse_program(self) -> Program:
        classes = []
        while self.peek() is not None:
            classes.append(self.parse_class())
        if not classes:
            raise ParseError("expected a class declaration, found end of input",
                             0, 1, expected=frozenset({"class"}), found="<eof>")
        span = Span(0, classes[-1].span.end)
        return Program(tuple(classes), span=span, line=classes[0].line)

    def parse_class(self) -> ClassDecl:
        start = self.expect("class")
        name = self.expect_ident()
        self.expect("{")
        fields: list[FieldDecl] = []
        methods: list[MethodDecl] = []
        while not self.at("}"):
            member = self.parse_member()
            if isinstance(member, FieldDecl):
                fields.append(member)
            else:
                methods.append(member)
        end = self.expect("}")
        return ClassDecl(name.lexeme, tuple(fields), tuple(methods),
                         span=self._span_from(start, end), line=start.line)

    def parse_member(self):
        start = self.peek()
        type_ = self.parse_type(allow_void=True)
        name = self.expect_ident()
        if self.at("("):
            return self.parse_method(start, type_, name)
        if type_.name == "void":
            self._fail(frozenset({"("}))
        init = None
        if self.at("="):
            self.advance()
            init = self.parse_expression()
        end = self.expect(";")
        return FieldDecl(type_, name.lexeme, init,
                         span=self._span_from(start, end), line=start.line)

    def parse_method(self, start: Token, ret_type: TypeRef, name: Token) -> MethodDecl:
        self.expect("(")
        params: list[Param] = []
        if not self.at(")"):
            while True:
                p_start = self.peek()
                p_type = self.parse_type(allow_void=False)
                p_name = self.expect_ident()
                params.append(Param(p_type, p_name.lexeme,
                                    span=self._span_from(p_start, p_name),
                                    line=p_start.line))
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        body = self.parse_block()
        span = Span(start.span.start, body.span.end - start.span.start)
        return MethodDecl(ret_type, name.lexeme, tuple(params), body,
                          span=span, line=start.line)

    def parse_type(self, allow_void: bool) -> TypeRef:
        tok = self.peek()
        if tok is None:
            self._fail(frozenset({"<type>"}))
        if tok.lexeme in ("int", "boolean", "String") or (
                allow_void and tok.lexeme == "void"):
            base = self.advance()
        elif tok.kind is TokenKind.IDENT:
            base = self.advance()
        else:
            self._fail(frozenset({"int", "boolean", "String", "<class name>"}))
        dims = 0
        end = base
        if base.lexeme != "void" and self.at("[") and \
                self.peek(1) is not None and self.peek(1).lexeme == "]":
            self.advance()
            end = self.advance()
            dims = 1
        return TypeRef(base.lexeme, dims,
                       span=self._span_from(base, end), line=base.line)

    # ------------------------------------------------------------
    # statements
    # ------------------------------------------------------------

    def parse_block(self) -> Block:
        start = self.expect("{")
        stmts = []
        while not self.at("}"):
            stmts.append(self.parse_statement())
        end = self.expect("}")
        return Block(tuple(stmts), span=self._span_from(start, end),
                     line=start.line)

    def parse_statement(self):
        tok = self.peek()
        if tok is None:
            self._fail(frozenset({"<statement>"}))
        if tok.lexeme == "if":
            return self.parse_if()
        if tok.lexeme == "while":
            return self.parse_while()
        if tok.lexeme == "do":
            return self.parse_do_while()
        if tok.lexeme == "return":
            return self.parse_return()
        if tok.lexeme == "{":
            return self.parse_block()
        if tok.lexeme in ("int", "boolean", "String") or self._at_class_decl():
            return self.parse_var_decl()
        return self.parse_simple_statement()

    def _at_class_decl(self) -> bool:
        # IDENT IDENT ...  or  IDENT [ ] IDENT ...  opens a declaration of a
        # class-typed variable; anything else is an expression statement.
        tok = self.peek()
        if tok is None or tok.kind is not TokenKind.IDENT:
            return False
        nxt = self.peek(1)
        if nxt is not None and nxt.kind is TokenKind.IDENT:
            return True
        return (nxt is not None and nxt.lexeme == "["
                and self.peek(2) is not None and self.peek(2).lexeme == "]"
                and self.peek(3) is not None
                and self.peek(3).kind is TokenKind.IDENT)

    def parse_var_decl(self) -> VarDecl:
        start = self.peek()
        type_ = self.parse_type(allow_void=False)
        name = self.expect_ident()
        init = None
        if self.at("="):
            self.advance()
            init = self.parse_expression()
        end = self.expect(";")
        return VarDecl(type_, name.lexeme, init,
                       span=self._span_from(start, end), line=start.line)

    def parse_if(self) -> If:
        start = self.expect("if")
        self.expect("(")
        cond = self.parse_expression()
        self.expect(")")
        then = self.parse_block()
        orelse = None
        end_span = then.span
        if self.at("else"):
            self.advance()
            orelse = self.parse_if() if self.at("if") else self.parse_block()
            end_span = orelse.span
        span = Span(start.span.start, end_span.end - start.span.start)
        return If(cond, then, orelse, span=span, line=start.line)

    def parse_while(self) -> While:
        start = self.expect("while")
        self.expect("(")
        cond = self.parse_expression()
        self.expect(")")
        body = self.parse_block()
        span = Span(start.span.start, body.span.end - start.span.start)
        return While(cond, body, span=span, line=start.line)

    def parse_do_while(self) -> DoWhile:
        start = self.expect("do")
        body = self.parse_block()
        self.expect("while")
        self.expect("(")
        cond = self.parse_expression()
        self.expect(")")
        end = self.expect(";")
        return DoWhile(body, cond, span=self._span_from(start, end),
                       line=start.line)

    def parse_return(self) -> Return:
        start = self.expect("return")
        value = None
        if not self.at(";"):
            value = self.parse_expression()
        end = self.expect(";")
        return Return(value, span=self._span_from(start, end), line=start.line)

    def parse_simple_statement(self):
        start = self.peek()
        expr = self.parse_expression()
        tok = self.peek()
        if tok is not None and tok.lexeme in ASSIGN_OPS:
            if not isinstance(expr, (Name, FieldAccess, Index)):
                raise ParseError("invalid assignment target", tok.span.start,
                                 tok.line, expected=frozenset({";"}),
                                 found=tok.lexeme)
            op = self.advance()
            value = self.parse_expression()
            end = self.expect(";")
            return Assign(expr, op.lexeme, value, op_span=op.span,
                          span=self._span_from(start, end), line=start.line)
        end = self.expect(";")
        return ExprStmt(expr, span=self._span_from(start, end), line=start.line)

    # ------------------------------------------------------------
    # expressions, by descending precedence
    # ------------------------------------------------------------

    def parse_expression(self):
        return self._binary(0)

    _LEVELS = (
        ("||",),
        ("&&",),
        ("==", "!="),
        ("<", "<=", ">", ">="),
        ("+", "-"),
        ("*", "/", "%"),
    )

    def _binary(self, level: int):
        if level >= len(self._LEVELS):
            return self.parse_unary()
        ops = self._LEVELS[level]
        expr = self._binary(level + 1)
        while True:
            tok = self.peek()
            if tok is None or tok.lexeme not in ops or \
                    tok.kind is not TokenKind.OPERATOR:
                return expr
            op = self.advance()
            right = self._binary(level + 1)
            span = Span(expr.span.start, right.span.end - expr.span.start)
            expr = Binary(op.lexeme, expr, right, op_span=op.span,
                          span=span, line=expr.line)

    def parse_unary(self):
        tok = self.peek()
        if tok is not None and tok.kind is TokenKind.OPERATOR and \
                tok.lexeme in ("!", "-", "++", "--"):
            op = self.advance()
            operand = self.parse_unary()
            span = Span(op.span.start, operand.span.end - op.span.start)
            return Unary(op.lexeme, operand, span=span, line=op.line)
        return self.parse_postfix()

    def parse_postfix(self):
        expr = self.parse_primary()
        while True:
            if self.at("."):
                self.advance()
                name = self.expect_ident()
                if self.at("("):
                    args, end = self._parse_args()
                    span = Span(expr.span.start, end.span.end - expr.span.start)
                    expr = Call(expr, name.lexeme, args, name_span=name.span,
                                span=span, line=expr.line)
                else:
                    span = Span(expr.span.start,
                                name.span.end - expr.span.start)
                    expr = FieldAccess(expr, name.lexeme, name_span=name.span,
                                       span=span, line=expr.line)
            elif self.at("["):
                self.advance()
                index = self.parse_expression()
                end = self.expect("]")
                span = Span(expr.span.start, end.span.end - expr.span.start)
                expr = Index(expr, index, span=span, line=expr.line)
            else:
                return expr

    def _parse_args(self) -> tuple[tuple, Token]:
        self.expect("(")
        args = []
        if not self.at(")"):
            while True:
                args.append(self.parse_expression())
                if not self.at(","):
                    break
                self.advance()
        end = self.expect(")")
        return tuple(args), end

    def parse_primary(self):
        tok = self.peek()
        if tok is None:
            self._fail(frozenset({"<expression>"}))
        if tok.kind is TokenKind.LITERAL:
            self.advance()
            if tok.lexeme == "true" or tok.lexeme == "false":
                return BoolLit(tok.lexeme == "true", span=tok.span,
                               line=tok.line)
            if tok.lexeme == "null":
                return NullLit(span=tok.span, line=tok.line)
            if tok.lexeme.startswith('"'):
                return StrLit(_unescape(tok.lexeme), span=tok.span,
                              line=tok.line)
            return IntLit(int(tok.lexeme), span=tok.span, line=tok.line)
        if tok.kind is TokenKind.IDENT:
            self.advance()
            if tok.lexeme in self.type_names:
                return TypeName(tok.lexeme, span=tok.span, line=tok.line)
            if self.at("("):
                args, end = self._parse_args()
                span = Span(tok.span.start, end.span.end - tok.span.start)
                return Call(None, tok.lexeme, args, name_span=tok.span,
                            span=span, line=tok.line)
            return Name(tok.lexeme, span=tok.span, line=tok.line)
        if tok.lexeme == "(":
            self.advance()
            expr = self.parse_expression()
            self.expect(")")
            return expr
        self._fail(frozenset({"<expression>"}))


def _unescape(lexeme: str) -> str:
    body = lexeme[1:-1]
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            out.append(_ESCAPES.get(body[i + 1], body[i + 1]))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _fmt(expected: frozenset[str]) -> str:
    return ", ".join(sorted(expected))
