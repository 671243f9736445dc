"""Shared helpers for building small MiniJ programs in tests."""
from mutalm.minij import parse, render


def wrap_stmts(body: str, params: str = "int a, int b", ret: str = "int",
               cls: str = "A") -> str:
    return f"class {cls} {{ {ret} f({params}) {{ {body} }} }}"


def canon(text: str) -> str:
    """Canonical rendering of source text."""
    return render(parse(text))
