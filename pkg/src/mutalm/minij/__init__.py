"""MiniJ language core: lexer, parser, canonical renderer, validator."""
from . import ast
from .analysis import (Analysis, Diagnostic, ValidationReport, analyze,
                       check_source, validate)
from .ast import Program, Span, SourceUnit, statement_ordinals
from .lexer import (LexError, MASK_TOKEN, Token, TokenKind, join_lexemes,
                    lexemes, normalized_stream, tokenize)
from .parser import ParseError, parse
from .printer import render, render_expr

__all__ = [
    "Analysis", "Diagnostic", "LexError", "MASK_TOKEN", "ParseError",
    "Program", "SourceUnit", "Span", "Token", "TokenKind",
    "ValidationReport", "analyze", "ast", "check_source", "join_lexemes",
    "lexemes", "normalized_stream", "parse", "render", "render_expr",
    "statement_ordinals", "tokenize", "validate",
]
