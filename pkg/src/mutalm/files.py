"""Disk formats for mutant sets, campaign results, and compare manifests.

Mutant sets record the program by path rather than by content, so the
loader resolves that reference (as written first, then relative to the
set file) and rebuilds full Mutant records, recomputing each token-stream
key from the stored source. Saving and loading are lossless for every
field the toolkit computes on.
"""
from __future__ import annotations

import difflib
import os
from dataclasses import dataclass

from .factory import Mutant, MutantSet, normalized_key
from .schemas import (CAMPAIGN_SCHEMA, COMPARE_MANIFEST_SCHEMA,
                      MUTANT_SET_SCHEMA, SchemaError, dump_json, load_json,
                      validate_payload)
from .sim import CampaignResult


def unified_mutant_diff(original: str, mutated: str) -> str:
    """Line diff between the unmutated program and one mutant."""
    return "".join(difflib.unified_diff(
        original.splitlines(keepends=True),
        mutated.splitlines(keepends=True),
        fromfile="original", tofile="mutant"))


def mutant_set_payload(mset: MutantSet, program_ref: str) -> dict:
    mutants = [{
        "id": m.id,
        "order": m.order,
        "line": m.line,
        "kind": m.kind,
        "original": m.original_lexeme,
        "replacement": m.replacement_lexeme,
        "rank": m.prediction_rank,
        "diff": unified_mutant_diff(mset.original_source, m.rendered_source),
        "source": m.rendered_source,
    } for m in mset.mutants]
    return {"program": program_ref, "seed": mset.seed, "mutants": mutants,
            "stats": mset.stats}


def save_mutant_set(mset: MutantSet, path, program_ref: str):
    dump_json(mutant_set_payload(mset, program_ref), path)


def resolve_program_ref(ref: str, set_path) -> str:
    """The recorded path as-is if it exists, else next to the set file."""
    if os.path.exists(ref):
        return ref
    sibling = os.path.join(os.path.dirname(os.path.abspath(set_path)), ref)
    if os.path.exists(sibling):
        return sibling
    raise SchemaError(f"program file not found: {ref}", "$.program")


def load_mutant_set(path, program_text: str | None = None) -> MutantSet:
    """Rebuild a MutantSet; program_text overrides the recorded path."""
    payload = validate_payload(load_json(path), MUTANT_SET_SCHEMA, str(path))
    if program_text is None:
        with open(resolve_program_ref(payload["program"], path),
                  encoding="utf-8") as fh:
            program_text = fh.read()
    mutants = []
    seen = set()
    for i, m in enumerate(payload["mutants"]):
        if m["id"] in seen:
            raise SchemaError(f"duplicate mutant id {m['id']!r}",
                              f"$.mutants[{i}].id")
        seen.add(m["id"])
        mutants.append(Mutant(m["id"], m["order"], m["line"], m["kind"],
                              m["original"], m["replacement"], m["rank"],
                              m["source"], normalized_key(m["source"])))
    return MutantSet(payload["program"], payload["seed"], program_text,
                     tuple(mutants), payload["stats"])


def campaign_payload(result: CampaignResult) -> dict:
    return {
        "bug": result.bug_id,
        "approach": result.approach,
        "repetitions": result.repetitions,
        "effort_cap": result.effort_cap,
        "detection_ratio": result.detection_ratio,
        "curve": [[fraction, ratio] for fraction, ratio in
                  result.detection_curve],
    }


def save_campaign(result: CampaignResult, path):
    dump_json(campaign_payload(result), path)


def load_campaign(path) -> CampaignResult:
    payload = validate_payload(load_json(path), CAMPAIGN_SCHEMA, str(path))
    curve = tuple((fraction, ratio) for fraction, ratio in payload["curve"])
    return CampaignResult(payload["bug"], payload["approach"],
                          payload["repetitions"], payload["detection_ratio"],
                          curve, payload["effort_cap"])


@dataclass(frozen=True)
class CompareEntry:
    bug: str
    matrix_paths: dict  # approach label -> resolved path


def load_compare_manifest(path) -> tuple[CompareEntry, ...]:
    """Per-bug labelled matrix paths, resolved relative to the manifest.

    Every bug must offer the same approach labels: the downstream
    statistics pair detection ratios per approach across bugs.
    """
    payload = validate_payload(load_json(path), COMPARE_MANIFEST_SCHEMA,
                               str(path))
    base = os.path.dirname(os.path.abspath(path))
    entries = []
    labels = None
    seen_bugs = set()
    for i, item in enumerate(payload["bugs"]):
        if item["bug"] in seen_bugs:
            raise SchemaError(f"duplicate bug id {item['bug']!r}",
                              f"$.bugs[{i}].bug")
        seen_bugs.add(item["bug"])
        here = set(item["matrices"])
        if labels is None:
            labels = here
        elif here != labels:
            raise SchemaError(
                f"bug {item['bug']!r} lists approaches "
                f"{sorted(here)}, expected {sorted(labels)}",
                f"$.bugs[{i}].matrices")
        resolved = {}
        for label, ref in item["matrices"].items():
            resolved[label] = ref if os.path.exists(ref) \
                else os.path.join(base, ref)
        entries.append(CompareEntry(item["bug"], resolved))
    return tuple(entries)
