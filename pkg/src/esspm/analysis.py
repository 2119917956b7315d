"""Stability condition checks, pure-strategy preprocessing, and solution-quality metrics.

A candidate x* resists a mutant x when either the mutant does strictly worse
against the incumbent population, or it ties against the population but does
strictly worse against itself than the incumbent does against it. Exact payoff
equality is unreliable in floating point, so the tie test is softened to a band
of half-width ``delta`` around zero.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .game import GameMatrix, MixedStrategy, utility

__all__ = [
    "Tolerances",
    "Condition",
    "ConditionOutcome",
    "InvasionResult",
    "check_conditions",
    "find_pure_esspm",
    "find_all_pure_esspm",
    "invasion_test",
    "approximation_error",
    "nash_epsilon",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical precision knobs shared across the pipeline.

    delta: half-width of the payoff-equality band (tie detection).
    eps:   margin the MILP uses to represent strict inequalities.
    """

    delta: float = 1e-7
    eps: float = 1e-5

    def __post_init__(self) -> None:
        if self.delta <= 0.0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.eps <= 0.0:
            raise ValueError(f"eps must be positive, got {self.eps}")


class Condition(enum.Enum):
    """Which stability condition a pure mutant satisfies against a candidate."""

    FIRST_STRICT = "first_strict"
    SECOND_EQUALITY = "second_equality"
    FAILS = "fails"


@dataclass(frozen=True)
class ConditionOutcome:
    """Condition tag plus the margin of the governing inequality.

    For FIRST_STRICT the slack is u1(x*,x*) - u1(j,x*) > delta. For
    SECOND_EQUALITY it is u1(x*,j) - u1(j,j) > 0. For FAILS it is the
    (nonpositive) margin of whichever inequality was violated.
    """

    tag: Condition
    slack: float

    @property
    def holds(self) -> bool:
        return self.tag is not Condition.FAILS


class InvasionResult(enum.Enum):
    RESISTED = "resisted"
    INVADES = "invades"


def check_conditions(
    game: GameMatrix, xstar: MixedStrategy, j: int, tol: Tolerances = Tolerances()
) -> ConditionOutcome:
    """Classify pure mutant ``j`` against candidate ``xstar``.

    FIRST_STRICT: u1(j,x*) < u1(x*,x*) - delta.
    SECOND_EQUALITY: |u1(j,x*) - u1(x*,x*)| <= delta and u1(j,j) < u1(x*,j).
    FAILS otherwise. At most one of the two stability conditions can hold, so
    testing them in order is exhaustive.
    """
    if not 0 <= j < game.m:
        raise ValueError(f"mutant index {j} out of range for m={game.m}")
    against = game.payoffs @ xstar.probs  # against[i] = u1(i, x*)
    d = float(against[j] - xstar.probs @ against)
    if d < -tol.delta:
        return ConditionOutcome(Condition.FIRST_STRICT, -d)
    if d <= tol.delta:
        margin = float(xstar.probs @ game.payoffs[:, j] - game.payoffs[j, j])
        if margin > 0.0:
            return ConditionOutcome(Condition.SECOND_EQUALITY, margin)
        return ConditionOutcome(Condition.FAILS, margin)
    return ConditionOutcome(Condition.FAILS, -d)


def _pure_is_stable(game: GameMatrix, i: int, tol: Tolerances) -> bool:
    xstar = MixedStrategy.pure(i, game.m)
    return all(
        check_conditions(game, xstar, j, tol).holds for j in range(game.m) if j != i
    )


def find_pure_esspm(game: GameMatrix, tol: Tolerances = Tolerances()) -> int | None:
    """Preprocessing pass: lowest pure strategy stable against every pure mutant.

    Returns None when no pure strategy qualifies, in which case any solution
    must be properly mixed.
    """
    for i in range(game.m):
        if _pure_is_stable(game, i, tol):
            return i
    return None


def find_all_pure_esspm(game: GameMatrix, tol: Tolerances = Tolerances()) -> list[int]:
    """Exhaustive variant of :func:`find_pure_esspm`: all qualifying pure strategies."""
    return [i for i in range(game.m) if _pure_is_stable(game, i, tol)]


def invasion_test(
    game: GameMatrix,
    xstar: MixedStrategy,
    mutant: MixedStrategy,
    tol: Tolerances = Tolerances(),
) -> InvasionResult:
    """Test whether a (possibly mixed) mutant can invade the candidate.

    The mutant must differ from the candidate by more than ``delta`` in some
    component. RESISTED mirrors the pure-mutant conditions with the same
    softened equality.
    """
    if xstar.m != game.m or mutant.m != game.m:
        raise ValueError("strategy dimensions do not match the game")
    if float(np.max(np.abs(mutant.probs - xstar.probs))) <= tol.delta:
        raise ValueError("mutant must differ from the candidate strategy")
    d = utility(game, mutant, xstar) - utility(game, xstar, xstar)
    if d < -tol.delta:
        return InvasionResult.RESISTED
    if d <= tol.delta and utility(game, mutant, mutant) < utility(game, xstar, mutant):
        return InvasionResult.RESISTED
    return InvasionResult.INVADES


def approximation_error(
    game: GameMatrix, xstar: MixedStrategy, tol: Tolerances = Tolerances()
) -> float:
    """Worst per-mutant stability violation of a candidate, in normalized payoff units.

    For each pure mutant i, with d = u1(i,x*) - u1(x*,x*):
      d > delta          -> violation d (mutant strictly gains against the population)
      |d| <= delta       -> violation max(0, u1(i,i) - u1(x*,i)) (tie broken the wrong way)
      d < -delta         -> 0
    Returns the maximum over mutants; 0 means stable at this precision.
    """
    if not game.is_normalized:
        raise ValueError("approximation_error expects a normalized game; call normalize() first")
    if xstar.m != game.m:
        raise ValueError("strategy dimension does not match the game")
    against = game.payoffs @ xstar.probs
    base = float(xstar.probs @ against)
    worst = 0.0
    for i in range(game.m):
        d = float(against[i]) - base
        if d > tol.delta:
            theta = d
        elif d > -tol.delta:
            theta = max(0.0, float(game.payoffs[i, i] - xstar.probs @ game.payoffs[:, i]))
        else:
            theta = 0.0
        worst = max(worst, theta)
    return worst


def nash_epsilon(game: GameMatrix, xstar: MixedStrategy) -> float:
    """Largest unilateral gain from deviating to a pure strategy, clamped at 0.

    Zero exactly when (x*, x*) is a symmetric Nash equilibrium. Both players
    face the same deviation problem in a symmetric profile, so one maximum
    suffices.
    """
    if xstar.m != game.m:
        raise ValueError("strategy dimension does not match the game")
    against = game.payoffs @ xstar.probs
    return max(0.0, float(against.max() - xstar.probs @ against))
