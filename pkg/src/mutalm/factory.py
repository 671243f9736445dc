"""Mutant generation: mask, predict, substitute, filter, select.

The pipeline is eager and deterministic. First-order candidates come from
masking individual AST nodes; second-order candidates come from seeding
conditions and masking the seeded tokens. Filtering drops predictions that
reproduce the masked-out text, candidates that fail to compile, and
token-stream duplicates. Output order follows the one-mutant-per-line
iterative selection: lines are shuffled once per phase, then swept
round-robin taking one randomly chosen remaining candidate per line, with
every first-order mutant emitted before any second-order one.
"""
from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field

from .minij import (LexError, MASK_TOKEN, ValidationReport, analyze,
                    check_source, normalized_stream, parse, render, tokenize)
from .minij.ast import SourceUnit
from .predictor import Prediction, PredictorConfig, predict_many
from .seeding import (SeededCondition, collect_class_conditions,
                      condition_sites, seed_with_conditions,
                      seed_with_variables)
from .targets import MaskedSequence, collect_targets, crop_window, mask_all

STAT_KEYS = ("predicted", "exact", "duplicate", "non_compilable", "emitted",
             "quota_surplus")


class FactoryError(Exception):
    pass


class EmptyUnit(FactoryError):
    """The program contains nothing to mutate."""


class SpliceUnparseable(FactoryError):
    """The predicted token cannot even be lexed at the mask site."""


@dataclass(frozen=True)
class Mutant:
    id: str
    order: str                 # "first" | "second"
    line: int
    kind: str                  # node kind, or the seeding scheme
    original_lexeme: str
    replacement_lexeme: str
    prediction_rank: int
    rendered_source: str = field(repr=False)
    normalized_key: str = field(repr=False)


@dataclass(frozen=True)
class MutantSet:
    program_id: str
    seed: int
    original_source: str
    mutants: tuple[Mutant, ...]
    stats: dict


class Candidate:
    """A substituted program plus its compile verdict.

    The verdict is computed on first access: most candidates are thrown
    out as exact or duplicate before anyone needs the full analysis, and
    skipping it there is a large constant-factor win.
    """

    __slots__ = ("text", "seq", "prediction", "_tokens", "_report")

    def __init__(self, text: str, seq: MaskedSequence,
                 prediction: Prediction, tokens=None):
        self.text = text
        self.seq = seq
        self.prediction = prediction
        self._tokens = tokens if tokens is not None else tokenize(text)
        self._report = None

    @property
    def report(self) -> ValidationReport:
        if self._report is None:
            self._report = check_source(self.text, self._tokens)
        return self._report

    def norm_key(self) -> tuple:
        return tuple((t.kind.value, t.lexeme) for t in self._tokens)


def _splice(seq: MaskedSequence, replacement: str) -> str:
    data = seq.source_text.encode("utf-8")
    span = seq.splice_span
    piece = (replacement + seq.splice_suffix).encode("utf-8")
    return (data[:span.start] + piece + data[span.end:]).decode("utf-8")


def substitute(unit: SourceUnit | None, seq: MaskedSequence,
               p: Prediction) -> Candidate:
    """Splice one prediction into the sequence's source and recheck it."""
    if not seq.source_text:
        if unit is None:
            raise ValueError("sequence carries no source and no unit given")
        seq = MaskedSequence(seq.tokens, seq.mask_index, seq.origin,
                             seq.original_lexeme, render(unit),
                             seq.splice_span, seq.splice_suffix)
    text = _splice(seq, p.token_text)
    try:
        tokens = tokenize(text)
    except LexError as err:
        raise SpliceUnparseable(str(err)) from err
    return Candidate(text, seq, p, tokens)


def _norm_key(text: str) -> tuple:
    return normalized_stream(text)


def normalized_key(text: str) -> str:
    """Digest of the token stream, the identity used for deduplication."""
    key_bytes = "\x1f".join(
        f"{tk}\x1e{lex}" for tk, lex in _norm_key(text)
    ).encode("utf-8")
    return hashlib.blake2b(key_bytes, digest_size=16).hexdigest()


def _mutant_from(candidate: Candidate, order: str, kind: str,
                 line: int) -> Mutant:
    rendered = render(parse(candidate.text, candidate._tokens))
    hash8 = hashlib.blake2b(rendered.encode("utf-8"),
                            digest_size=4).hexdigest()
    rank = candidate.prediction.rank
    mutant_id = f"{line}:{kind}:{rank}:{hash8}"
    return Mutant(mutant_id, order, line, kind, candidate.seq.original_lexeme,
                  candidate.prediction.token_text, rank, rendered,
                  normalized_key(rendered))


# ---------------------------------------------------------------
# selection order
# ---------------------------------------------------------------

def _sweep_phase(mutants: list[Mutant], rng: random.Random) -> list[Mutant]:
    buckets: dict[int, list[Mutant]] = {}
    for m in mutants:
        buckets.setdefault(m.line, []).append(m)
    lines = sorted(buckets)
    rng.shuffle(lines)
    out = []
    while buckets:
        for line in lines:
            bucket = buckets.get(line)
            if bucket is None:
                continue
            out.append(bucket.pop(rng.randrange(len(bucket))))
            if not bucket:
                del buckets[line]
    return out


def selection_order(mutants: list[Mutant], seed: int) -> list[Mutant]:
    """One-mutant-per-line round-robin order, first order phase first."""
    rng = random.Random(seed)
    first = [m for m in mutants if m.order == "first"]
    second = [m for m in mutants if m.order == "second"]
    return _sweep_phase(first, rng) + _sweep_phase(second, rng)


# ---------------------------------------------------------------
# generation
# ---------------------------------------------------------------

class _Filter:
    """Shared filtering state: stats buckets plus the duplicate pool."""

    def __init__(self, original_text: str):
        self.stats = {order: dict.fromkeys(STAT_KEYS, 0)
                      for order in ("first", "second")}
        self.seen: set[tuple] = {_norm_key(original_text)}
        self.prediction_failures = 0

    def admit(self, candidate: Candidate, order: str) -> bool:
        bucket = self.stats[order]
        bucket["predicted"] += 1
        if (candidate.prediction.token_text
                == candidate.seq.original_lexeme):
            bucket["exact"] += 1
            return False
        key = candidate.norm_key()
        if key in self.seen:
            bucket["duplicate"] += 1
            return False
        if not candidate.report.ok:
            bucket["non_compilable"] += 1
            return False
        self.seen.add(key)
        return True


def _first_order_survivors(unit, cfg, filt) -> tuple[list[Mutant], int]:
    targets = collect_targets(unit)
    seqs = [crop_window(seq, cfg.window_limit)
            for seq in mask_all(unit, targets)]
    survivors = []
    for target, seq, preds in zip(targets, seqs, predict_many(seqs, cfg)):
        if preds is None:
            filt.prediction_failures += 1
            continue
        for p in preds:
            try:
                candidate = substitute(None, seq, p)
            except SpliceUnparseable:
                filt.stats["first"]["predicted"] += 1
                filt.stats["first"]["non_compilable"] += 1
                continue
            if filt.admit(candidate, "first"):
                survivors.append(_mutant_from(candidate, "first",
                                              target.node_kind, target.line))
    return survivors, len(seqs)


def _seeded_sequences(unit, text: str, info) -> tuple[list[MaskedSequence],
                                                      int, int]:
    """Masked sequences for every valid seeded condition, plus seed stats."""
    data = text.encode("utf-8")
    sequences = []
    seeds_total = 0
    seeds_invalid = 0
    for _cls, _method, stmt, kind, expr in condition_sites(unit, info):
        candidates = list(seed_with_conditions(
            expr, collect_class_conditions(unit, expr, info),
            statement_kind=kind))
        if kind == "if":
            candidates += seed_with_variables(expr, info.vars_at(stmt))
        for cand in candidates:
            seeds_total += 1
            span = cand.target_span
            seeded_text = (data[:span.start]
                           + cand.new_condition_text.encode("utf-8")
                           + data[span.end:]).decode("utf-8")
            try:
                tokens = tokenize(seeded_text)
            except LexError:
                seeds_invalid += 1
                continue
            if not check_source(seeded_text, tokens).ok:
                seeds_invalid += 1
                continue
            lexemes = tuple(t.lexeme for t in tokens)
            base = 0
            while tokens[base].span.end <= span.start:
                base += 1
            for site in cand.mask_sites:
                at = base + site
                masked = lexemes[:at] + (MASK_TOKEN,) + lexemes[at + 1:]
                sequences.append(MaskedSequence(
                    masked, at, cand, lexemes[at], seeded_text,
                    tokens[at].span, ""))
    return sequences, seeds_total, seeds_invalid


def _second_order_survivors(unit, text, cfg, filt
                             ) -> tuple[list[Mutant], int, int, int]:
    info = analyze(unit)
    raw, seeds_total, seeds_invalid = _seeded_sequences(unit, text, info)
    seqs = [crop_window(seq, cfg.window_limit) for seq in raw]
    survivors = []
    for seq, preds in zip(seqs, predict_many(seqs, cfg)):
        if preds is None:
            filt.prediction_failures += 1
            continue
        cand_origin: SeededCondition = seq.origin
        for p in preds:
            try:
                candidate = substitute(None, seq, p)
            except SpliceUnparseable:
                filt.stats["second"]["predicted"] += 1
                filt.stats["second"]["non_compilable"] += 1
                continue
            if filt.admit(candidate, "second"):
                survivors.append(_mutant_from(candidate, "second",
                                              cand_origin.scheme,
                                              cand_origin.line))
    return survivors, len(seqs), seeds_total, seeds_invalid


def generate(unit: SourceUnit, cfg: PredictorConfig,
             quota: int | None = None, seed: int = 0,
             program_id: str = "") -> MutantSet:
    """Run the whole pipeline on a validated unit."""
    if quota is not None and quota < 1:
        raise ValueError("quota must be >= 1 when given")
    text = render(unit)
    unit = parse(text)  # re-anchor spans to the canonical rendering
    filt = _Filter(text)

    first, n_first_seqs = _first_order_survivors(unit, cfg, filt)
    second, n_second_seqs, seeds_total, seeds_invalid = \
        _second_order_survivors(unit, text, cfg, filt)
    if n_first_seqs == 0 and seeds_total == 0:
        raise EmptyUnit("program has no maskable nodes")

    ordered = selection_order(first + second, seed)
    if quota is not None and quota < len(ordered):
        for m in ordered[quota:]:
            filt.stats[m.order]["quota_surplus"] += 1
        ordered = ordered[:quota]
    for m in ordered:
        filt.stats[m.order]["emitted"] += 1

    stats = dict(filt.stats)
    stats["second"]["seeds_total"] = seeds_total
    stats["second"]["seeds_invalid"] = seeds_invalid
    stats["prediction_failures"] = filt.prediction_failures
    stats["sequences"] = {"first": n_first_seqs, "second": n_second_seqs}
    return MutantSet(program_id, seed, text, tuple(ordered), stats)
