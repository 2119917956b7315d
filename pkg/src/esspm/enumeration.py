"""Brute-force oracle: enumerate supports, solve each tie system, certify stability.

Runs independently of the MILP path so the two can cross-check each other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .analysis import Condition, ConditionOutcome, Tolerances, check_conditions
from .game import GameMatrix, MixedStrategy, Support

__all__ = ["EsspmCertificate", "solve_support", "enumerate_esspm", "DEFAULT_SUPPORT_CAP"]

DEFAULT_SUPPORT_CAP = 20


@dataclass(frozen=True)
class EsspmCertificate:
    """A certified stable strategy: every pure mutant satisfies a stability condition."""

    strategy: MixedStrategy
    support: Support
    per_mutation: tuple[ConditionOutcome, ...]

    def min_slack(self) -> float:
        """Smallest margin across mutants; how far the certificate is from failing."""
        return min(outcome.slack for outcome in self.per_mutation)


def solve_support(
    game: GameMatrix, support: Support, tol: Tolerances = Tolerances()
) -> MixedStrategy | None:
    """Solve the tie system on a support: equal payoffs inside, zero outside.

    Returns None when the system is singular or the solution leaves the
    simplex (components below -1e-9). Components in (-1e-9, 0) are clamped.
    """
    support.validate_for(game.m)
    idx = list(support.indices)
    s = len(idx)
    a = game.payoffs
    probs = np.zeros(game.m)
    if s == 1:
        probs[idx[0]] = 1.0
        return MixedStrategy(probs)
    # Rows: payoff of each supported strategy minus the first one is zero,
    # plus the probability-sum row.
    mat = np.zeros((s, s))
    rhs = np.zeros(s)
    for r, strat in enumerate(idx[1:]):
        mat[r] = a[strat, idx] - a[idx[0], idx]
    mat[s - 1] = 1.0
    rhs[s - 1] = 1.0
    try:
        sol = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError:
        return None
    if np.max(np.abs(mat @ sol - rhs)) > 1e-8:
        return None  # numerically singular
    if sol.min() < -1e-9:
        return None
    sol = np.clip(sol, 0.0, None)
    total = sol.sum()
    if total <= 0.0:
        return None
    probs[idx] = sol / total
    return MixedStrategy(probs)


def _certify(
    game: GameMatrix, strategy: MixedStrategy, support: Support, tol: Tolerances
) -> EsspmCertificate | None:
    skip = support.indices[0] if len(support) == 1 else None
    outcomes = []
    for j in range(game.m):
        if j == skip:
            continue
        outcome = check_conditions(game, strategy, j, tol)
        if outcome.tag is Condition.FAILS:
            return None
        outcomes.append(outcome)
    return EsspmCertificate(strategy, support, tuple(outcomes))


def enumerate_esspm(
    game: GameMatrix,
    tol: Tolerances = Tolerances(),
    *,
    largest_first: bool = False,
    max_m: int = DEFAULT_SUPPORT_CAP,
    counters: dict | None = None,
) -> list[EsspmCertificate]:
    """All stable strategies found by exhausting the 2^m - 1 supports.

    Size-one supports reuse the pure-strategy test; larger supports go through
    the tie system and then full certification against every pure mutant.
    ``largest_first`` reverses the visiting order (useful when large-support
    solutions are expected); the returned list is always canonically ordered
    by (size, indices). ``counters`` (optional dict) receives the number of
    supports visited and of singular tie systems skipped.
    """
    m = game.m
    if m > max_m:
        raise ValueError(f"m={m} exceeds the enumeration cap of {max_m}")
    visited = 0
    singular_skipped = 0
    found: list[EsspmCertificate] = []
    sizes = range(m, 0, -1) if largest_first else range(1, m + 1)
    for size in sizes:
        for combo in itertools.combinations(range(m), size):
            visited += 1
            support = Support(combo)
            strategy = solve_support(game, support, tol)
            if strategy is None:
                if size > 1:
                    singular_skipped += 1
                continue
            if size > 1 and np.any(strategy.probs[list(combo)] <= 1e-9):
                continue  # degenerate: the solution does not actually use this support
            cert = _certify(game, strategy, support, tol)
            if cert is not None:
                found.append(cert)
    if counters is not None:
        counters["supports_visited"] = visited
        counters["singular_skipped"] = singular_skipped
    found.sort(key=lambda c: (len(c.support), c.support.indices))
    return found
