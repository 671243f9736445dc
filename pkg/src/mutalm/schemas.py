"""JSON schemas for every file format the toolkit reads or writes.

All loaders funnel through validate_payload, which turns jsonschema's
diagnostics into SchemaError carrying the JSON path of the offending
field, so CLI layers can report precisely what is wrong with an input.
"""
from __future__ import annotations

import json

from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

INT_MIN = -(2 ** 63)
INT_MAX = 2 ** 63 - 1

ERROR_KINDS = ["division-by-zero", "null-dereference", "array-bounds",
               "overflow", "stack-overflow"]

_IDENT = "[A-Za-z_][A-Za-z0-9_]*"

_SCALAR = {
    "oneOf": [
        {"type": "integer", "minimum": INT_MIN, "maximum": INT_MAX},
        {"type": "boolean"},
        {"type": "string"},
        {"type": "null"},
    ]
}

_VALUE = {
    "oneOf": [
        _SCALAR,
        {"type": "array", "items": _SCALAR},
    ]
}

SUITE_SCHEMA = {
    "type": "object",
    "required": ["tests"],
    "additionalProperties": False,
    "properties": {
        "tests": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "entry", "args", "expect"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "entry": {
                        "type": "string",
                        "pattern": f"^{_IDENT}\\.{_IDENT}$",
                    },
                    "args": {"type": "array", "items": _VALUE},
                    "expect": {
                        "oneOf": [
                            {
                                "type": "object",
                                "required": ["value"],
                                "additionalProperties": False,
                                "properties": {"value": _VALUE},
                            },
                            {
                                "type": "object",
                                "required": ["error"],
                                "additionalProperties": False,
                                "properties": {
                                    "error": {"enum": ERROR_KINDS},
                                },
                            },
                        ]
                    },
                },
            },
        }
    },
}

KILL_MATRIX_SCHEMA = {
    "type": "object",
    "required": ["mutants", "tests", "kills", "revealing_tests"],
    "additionalProperties": False,
    "properties": {
        "mutants": {"type": "array", "items": {"type": "string"}},
        "tests": {"type": "array", "items": {"type": "string"}},
        "kills": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "boolean"}},
        },
        "revealing_tests": {"type": "array", "items": {"type": "string"}},
        "approach": {"type": "string"},
    },
}

MUTANT_SET_SCHEMA = {
    "type": "object",
    "required": ["program", "seed", "mutants", "stats"],
    "additionalProperties": False,
    "properties": {
        "program": {"type": "string"},
        "seed": {"type": "integer"},
        "mutants": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "order", "line", "kind", "original",
                             "replacement", "rank", "diff", "source"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "order": {"enum": ["first", "second"]},
                    "line": {"type": "integer", "minimum": 1},
                    "kind": {"type": "string", "minLength": 1},
                    "original": {"type": "string"},
                    "replacement": {"type": "string"},
                    "rank": {"type": "integer", "minimum": 1},
                    "diff": {"type": "string"},
                    "source": {"type": "string", "minLength": 1},
                },
            },
        },
        "stats": {"type": "object"},
    },
}

CAMPAIGN_SCHEMA = {
    "type": "object",
    "required": ["bug", "approach", "repetitions", "effort_cap",
                 "detection_ratio", "curve"],
    "additionalProperties": False,
    "properties": {
        "bug": {"type": "string"},
        "approach": {"type": "string"},
        "repetitions": {"type": "integer", "minimum": 1},
        "effort_cap": {"type": "integer", "minimum": 1},
        "detection_ratio": {"type": "number", "minimum": 0, "maximum": 1},
        "curve": {
            "type": "array",
            "items": {
                "type": "array",
                "minItems": 2,
                "maxItems": 2,
                "items": {"type": "number", "minimum": 0, "maximum": 1},
            },
        },
    },
}

COMPARE_MANIFEST_SCHEMA = {
    "type": "object",
    "required": ["bugs"],
    "additionalProperties": False,
    "properties": {
        "bugs": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["bug", "matrices"],
                "additionalProperties": False,
                "properties": {
                    "bug": {"type": "string", "minLength": 1},
                    "matrices": {
                        "type": "object",
                        "minProperties": 2,
                        "additionalProperties": {"type": "string"},
                    },
                },
            },
        }
    },
}


class SchemaError(ValueError):
    """An input file violates its schema; path points at the bad field."""

    def __init__(self, message: str, path: str = "$"):
        self.path = path
        super().__init__(f"{path}: {message}")


def validate_payload(instance, schema: dict, source: str = "input"):
    """Check instance against schema; raise SchemaError on the best match."""
    validator = Draft202012Validator(schema)
    error = best_match(validator.iter_errors(instance))
    if error is not None:
        raise SchemaError(f"{source}: {error.message}", error.json_path)
    return instance


def load_json(path) -> object:
    """Read a JSON document, reporting parse failures as SchemaError."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc.msg} at line "
                          f"{exc.lineno})") from exc


def dump_json(payload, path):
    """Write a JSON document in the one canonical layout used everywhere."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
