"""Paired nonparametric statistics for comparing mutation approaches.

The Wilcoxon signed-rank test here is one-sided (H1: x stochastically
greater than y), drops zero differences, assigns average ranks to tied
absolute differences, and switches between the exact null distribution
(enumerated by dynamic programming over doubled ranks, which stay integral
under average ranking) and a normal approximation with continuity and tie
corrections once the effective sample outgrows exact enumeration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

EXACT_LIMIT = 25  # largest n_effective evaluated by exact enumeration


class EmptySample(ValueError):
    """A statistical operation received an empty sample."""


class UniverseMismatch(ValueError):
    """Approaches disagree on the set of bugs they were run against."""


@dataclass(frozen=True)
class PairedSample:
    """Per-bug detection ratios of two approaches, paired by bug label."""

    labels: tuple
    x: tuple
    y: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "x", tuple(self.x))
        object.__setattr__(self, "y", tuple(self.y))
        if not self.labels:
            raise EmptySample("paired sample needs at least one pair")
        if not (len(self.labels) == len(self.x) == len(self.y)):
            raise ValueError("labels, x, and y must have equal lengths")


@dataclass(frozen=True)
class StatSummary:
    p_value: float
    a12: float
    n_effective: int


# ------------------------------------------------------------
# Wilcoxon signed-rank, one-sided
# ------------------------------------------------------------

def _doubled_average_ranks(magnitudes: list) -> list[int]:
    """Average ranks of the values, doubled so ties stay integral."""
    n = len(magnitudes)
    order = sorted(range(n), key=lambda i: magnitudes[i])
    doubled = [0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and magnitudes[order[j + 1]] == \
                magnitudes[order[i]]:
            j += 1
        rank2 = (i + 1) + (j + 1)  # twice the average rank of the tie run
        for k in range(i, j + 1):
            doubled[order[k]] = rank2
        i = j + 1
    return doubled


def _nonzero_differences(sample: PairedSample) -> list:
    return [xi - yi for xi, yi in zip(sample.x, sample.y) if xi != yi]


def n_effective(sample: PairedSample) -> int:
    """Pairs contributing to the test after zero differences drop out."""
    return len(_nonzero_differences(sample))


def exact_signed_rank_p(diffs: list) -> float:
    """P(W+ >= observed) by enumerating the 2^n sign-assignment null."""
    doubled = _doubled_average_ranks([abs(d) for d in diffs])
    observed = sum(r for r, d in zip(doubled, diffs) if d > 0)
    counts = [1]  # counts[s] = sign assignments with doubled W+ == s
    for rank2 in doubled:
        nxt = counts + [0] * rank2
        for s, c in enumerate(counts):
            if c:
                nxt[s + rank2] += c
        counts = nxt
    tail = sum(counts[observed:])
    return float(Fraction(tail, 2 ** len(diffs)))


def normal_signed_rank_p(diffs: list) -> float:
    """Upper-tail normal approximation with continuity and tie
    corrections."""
    n = len(diffs)
    doubled = _doubled_average_ranks([abs(d) for d in diffs])
    w_plus = sum(r for r, d in zip(doubled, diffs) if d > 0) / 2.0
    mean = n * (n + 1) / 4.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0
    runs: dict = {}
    for r in doubled:
        runs[r] = runs.get(r, 0) + 1
    for t in runs.values():
        variance -= (t ** 3 - t) / 48.0
    z = (w_plus - 0.5 - mean) / math.sqrt(variance)
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def wilcoxon_paired_one_sided(sample: PairedSample) -> float:
    """One-sided p-value for H1: x stochastically greater than y."""
    diffs = _nonzero_differences(sample)
    if not diffs:
        return 1.0  # every pair tied: no evidence either way
    if len(diffs) <= EXACT_LIMIT:
        return exact_signed_rank_p(diffs)
    return normal_signed_rank_p(diffs)


# ------------------------------------------------------------
# Vargha-Delaney A12
# ------------------------------------------------------------

def vargha_delaney_a12(sample: PairedSample) -> float:
    """Probability estimate that a random x outranks a random y."""
    more = 0
    same = 0
    for xi in sample.x:
        for yj in sample.y:
            if xi > yj:
                more += 1
            elif xi == yj:
                same += 1
    return (more + 0.5 * same) / (len(sample.x) * len(sample.y))


def summarize_pair(sample: PairedSample) -> StatSummary:
    return StatSummary(wilcoxon_paired_one_sided(sample),
                       vargha_delaney_a12(sample), n_effective(sample))


# ------------------------------------------------------------
# detection overlap (Venn-style regions)
# ------------------------------------------------------------

def detection_overlap(results: dict, threshold: float) -> dict:
    """Partition bugs by which approaches meet the detection threshold.

    results maps approach -> {bug -> detection ratio}. All approaches
    must cover the same bugs. threshold 0 means "detected at all"
    (strictly above zero); any other threshold is inclusive (ratio >=
    threshold). Returns {approaches tuple -> bugs tuple}, including the
    empty tuple region for bugs nobody detects.
    """
    if not results:
        raise EmptySample("no approaches to overlap")
    approaches = sorted(results)
    universe = set(results[approaches[0]])
    for approach in approaches[1:]:
        if set(results[approach]) != universe:
            raise UniverseMismatch(
                f"approach '{approach}' covers different bugs than "
                f"'{approaches[0]}'")

    def meets(ratio: float) -> bool:
        return ratio > 0 if threshold == 0 else ratio >= threshold

    regions: dict = {}
    for bug in sorted(universe):
        members = tuple(a for a in approaches if meets(results[a][bug]))
        regions.setdefault(members, []).append(bug)
    return {members: tuple(bugs) for members, bugs in regions.items()}
