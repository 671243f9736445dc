"""Developer simulation over kill matrices.

Models a developer doing mutation testing: walk the mutants line by line
in seeded random order, spend one unit of effort analyzing each mutant
reached, discard unkilled mutants as (assumed) equivalent, and for killed
ones add one of their killing tests to the suite, which discards every
mutant that test kills. The bug is found when a selected test is one of
the revealing tests (those failing on the designated buggy version);
effort_to_first_reveal counts analyses up to and including that moment.

Mutant ids of the form "{line}:..." group into lines for the one-per-line
sweep; ids without that shape are treated as one line each, making the
sweep a plain random permutation for externally produced matrices.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from hashlib import blake2b

from .harness import KillMatrix


@dataclass(frozen=True)
class SessionTrace:
    analyzed_order: tuple
    selected_tests: tuple
    effort_to_first_reveal: int | None
    bug_found: bool
    total_effort: int


@dataclass(frozen=True)
class CampaignResult:
    bug_id: str
    approach: str
    repetitions: int
    detection_ratio: float
    detection_curve: tuple  # ((effort_fraction, mean detection), ...)
    effort_cap: int


def derive_seed(base_seed: int, *labels: str) -> int:
    """Stable 64-bit seed for a labeled sub-experiment."""
    key = ":".join([str(base_seed), *labels]).encode()
    return int.from_bytes(blake2b(key, digest_size=8).digest(), "big")


def _line_key(mutant_id: str, index: int):
    """Line group for the sweep; unparseable ids form singleton groups."""
    head = mutant_id.split(":", 1)[0]
    if head.isdigit():
        return ("line", int(head))
    return ("own", index)


def simulate_session(matrix: KillMatrix, order_seed: int,
                     effort_cap: int) -> SessionTrace:
    """One developer session; deterministic for a given (matrix, seed)."""
    if effort_cap < 1:
        raise ValueError("effort_cap must be positive")
    rng = random.Random(order_seed)
    n = len(matrix.mutant_ids)

    groups: dict = {}
    for i, mid in enumerate(matrix.mutant_ids):
        groups.setdefault(_line_key(mid, i), []).append(i)
    lines = sorted(groups)
    rng.shuffle(lines)

    alive = [True] * n
    analyzed: list = []
    selected: list = []
    revealing = set(matrix.revealing_tests)
    first_reveal = None
    effort = 0
    remaining = n
    while remaining and effort < effort_cap:
        progressed = False
        for line in lines:
            candidates = [i for i in groups[line] if alive[i]]
            if not candidates:
                continue
            if effort >= effort_cap:
                break
            progressed = True
            chosen = candidates[rng.randrange(len(candidates))]
            alive[chosen] = False
            remaining -= 1
            effort += 1
            analyzed.append(matrix.mutant_ids[chosen])
            killers = matrix.killers_for(chosen)
            if not killers:
                continue  # no test kills it: treated as equivalent
            test = killers[rng.randrange(len(killers))]
            name = matrix.test_names[test]
            selected.append(name)
            if first_reveal is None and name in revealing:
                first_reveal = effort
            for i in range(n):
                if alive[i] and matrix.kills[i][test]:
                    alive[i] = False
                    remaining -= 1
        if not progressed:
            break
    return SessionTrace(tuple(analyzed), tuple(selected), first_reveal,
                        first_reveal is not None, effort)


def run_campaign(matrix: KillMatrix, repetitions: int, effort_cap: int,
                 base_seed: int, bug_id: str = "",
                 approach: str | None = None) -> CampaignResult:
    """Average `repetitions` sessions seeded base_seed, base_seed+1, ...

    The detection curve holds, for each integer effort e in [1, cap], the
    fraction of sessions that had found the bug within e analyses, with
    efforts reported as fractions of the cap.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be positive")
    reveals = []
    found = 0
    for i in range(repetitions):
        trace = simulate_session(matrix, base_seed + i, effort_cap)
        if trace.bug_found:
            found += 1
            reveals.append(trace.effort_to_first_reveal)
    curve = []
    for effort in range(1, effort_cap + 1):
        hit = sum(1 for r in reveals if r <= effort)
        curve.append((effort / effort_cap, hit / repetitions))
    return CampaignResult(bug_id, approach or matrix.approach, repetitions,
                          found / repetitions, tuple(curve), effort_cap)


def mean_total_effort(matrix: KillMatrix, repetitions: int,
                      base_seed: int) -> float:
    """Mean analyses needed to consume every mutant, uncapped."""
    cap = max(1, len(matrix.mutant_ids))
    total = 0
    for i in range(repetitions):
        total += simulate_session(matrix, base_seed + i, cap).total_effort
    return total / repetitions


def common_effort_cap(matrices: list, repetitions: int,
                      base_seed: int) -> int:
    """Smallest mean uncapped total effort across approaches, as the
    shared budget for comparisons; rounded to the nearest integer, at
    least 1."""
    if not matrices:
        raise ValueError("need at least one (approach, matrix) pair")
    means = []
    for approach, matrix in matrices:
        means.append(mean_total_effort(matrix, repetitions,
                                       derive_seed(base_seed, "cap",
                                                   approach)))
    return max(1, int(math.floor(min(means) + 0.5)))
