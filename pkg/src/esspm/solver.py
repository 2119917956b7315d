"""Branch-and-bound feasibility solver for the linearized stability models.

Depth-first search over the branch indicators y: each node pins a subset of
them and solves the LP relaxation (binaries relaxed to [0, 1]); infeasible
relaxations prune the subtree. When every indicator is integral the node's
pattern S = {j : y_j = 1} is attempted: a second LP phase drives the
probability mass of strategies outside S to zero, the candidate is refined by
solving the S-tie system directly, and the result is accepted only if it
satisfies the branch rows with z replaced by the exact quadratic value
x' A x. The final assignment carries secant-interpolated lambdas, so it meets
the SOS2 adjacency requirement by construction.

The exactness gate is what keeps the solver sound: the piecewise-linear
corridor around z is wide enough to admit points whose stability margin is
pure approximation artifact, and rejecting those at the leaves means a
Feasible verdict always corresponds to a genuine candidate at the model's
strictness margin. Infeasible is returned only after the pattern tree is
exhausted, so remaining false negatives are exactly the games whose true
margins fall below the model's eps.

A solve owns its node stack and never mutates the model, so independent
solves over shared models may run concurrently.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

import numpy as np

from .game import MixedStrategy
from .model import ModelIR, interpolation_assignment, verify_assignment
from .simplex import SolverError, lp_relax, lp_solve

__all__ = [
    "SolveStatus",
    "SolveLimits",
    "SolveStats",
    "SolveResult",
    "solve",
    "extract_strategy",
    "lp_relax",
    "SolverError",
]

_INT_TOL = 1e-6
_SUPPORT_MASS_TOL = 1e-9
_TIE_TOL = 1e-8
_MARGIN_TOL = 1e-9


class SolveStatus(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    LIMIT_REACHED = "limit_reached"


@dataclass(frozen=True)
class SolveLimits:
    max_nodes: int = 100_000
    max_time_ms: int = 600_000

    def __post_init__(self) -> None:
        if self.max_nodes <= 0 or self.max_time_ms <= 0:
            raise ValueError("solve limits must be positive")


@dataclass
class SolveStats:
    nodes: int = 0
    lp_iterations: int = 0
    wall_ms: float = 0.0


@dataclass
class SolveResult:
    status: SolveStatus
    assignment: dict[str, float] | None
    stats: SolveStats = field(default_factory=SolveStats)


def _pattern_margins(model: ModelIR) -> tuple[np.ndarray, np.ndarray]:
    """Per-strategy strictness margins (eps1_j, eps2_j) read back from the rows.

    Row layout from build_model: four rows per pure strategy j, where row 4j
    is the strict row with rhs -eps1 and row 4j+3 is the self-play row with
    rhs M4 - eps2 - a_jj and y-coefficient M4.
    """
    m = model.m
    eps1 = np.empty(m)
    eps2 = np.empty(m)
    for j in range(m):
        strict = model.rows[4 * j]
        selfplay = model.rows[4 * j + 3]
        if strict.name != f"strict_{j}" or selfplay.name != f"selfplay_{j}":
            raise ValueError("model rows are not in build_model order")
        eps1[j] = -strict.rhs
        m4 = selfplay.coeffs[model.y_indices[j]]
        eps2[j] = m4 - selfplay.rhs - float(model.payoffs[j, j])
    return eps1, eps2


def _refine_pattern(model: ModelIR, pattern: list[int], x_lp: np.ndarray) -> np.ndarray:
    """Sharpen the LP point by solving the tie system of the pattern directly.

    Unknowns are the probabilities on the pattern plus the common payoff
    value; strategies outside the pattern are pinned to zero. Falls back to
    the LP point (with off-pattern mass zeroed) if the system is singular.
    """
    a = model.payoffs
    s = len(pattern)
    mat = np.zeros((s + 1, s + 1))
    rhs = np.zeros(s + 1)
    for r, strat in enumerate(pattern):
        mat[r, :s] = a[strat, pattern]
        mat[r, s] = -1.0
    mat[s, :s] = 1.0
    rhs[s] = 1.0
    x_full = np.zeros(model.m)
    try:
        sol = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError:
        sol = None
    if sol is not None and np.max(np.abs(mat @ sol - rhs)) < 1e-8 and sol[:s].min() > -1e-9:
        x_full[pattern] = np.clip(sol[:s], 0.0, None)
    else:
        x_full[pattern] = np.clip(x_lp[pattern], 0.0, None)
    total = x_full.sum()
    if total <= 0.0:
        return x_full
    return x_full / total


def _exact_candidate_check(
    model: ModelIR, pattern: list[int], x: np.ndarray, eps1: np.ndarray, eps2: np.ndarray
) -> bool:
    """Branch rows evaluated against the true quadratic payoff instead of z.

    This is the original (non-linearized) feasibility question, so passing it
    certifies the candidate independently of the approximation corridor.
    """
    a = model.payoffs
    against = a @ x
    z_true = float(x @ against)
    in_pattern = np.zeros(model.m, dtype=bool)
    in_pattern[pattern] = True
    for j in range(model.m):
        if in_pattern[j]:
            if abs(against[j] - z_true) > _TIE_TOL:
                return False
            selfplay_margin = float(x @ a[:, j]) - float(a[j, j])
            if selfplay_margin < eps2[j] - _MARGIN_TOL:
                return False
        else:
            if against[j] > z_true - eps1[j] + _MARGIN_TOL:
                return False
    return True


def _attempt_pattern(
    model: ModelIR,
    pattern_set: dict[int, int],
    base_bounds: np.ndarray,
    stats: SolveStats,
    eps1: np.ndarray,
    eps2: np.ndarray,
) -> dict[str, float] | None:
    """Try to turn a fully pinned indicator pattern into a verified assignment."""
    pattern = sorted(j for j, v in pattern_set.items() if v == 1)
    if not pattern:
        return None  # every strategy strictly worse than the average: impossible
    bounds = base_bounds.copy()
    for j, v in pattern_set.items():
        yi = model.y_indices[j]
        bounds[yi, 0] = bounds[yi, 1] = float(v)
    off = [j for j in range(model.m) if j not in pattern]
    objective = None
    if off:
        objective = np.zeros(len(model.variables))
        for j in off:
            objective[model.x_indices[j]] = 1.0
    status, point, iters = lp_solve(model.rows, bounds, objective=objective)
    stats.lp_iterations += iters
    if status != "feasible":
        return None
    x_lp = point[model.x_indices]
    if off and sum(x_lp[j] for j in off) > _SUPPORT_MASS_TOL:
        return None
    x = _refine_pattern(model, pattern, x_lp)
    if not _exact_candidate_check(model, pattern, x, eps1, eps2):
        return None
    y = np.zeros(model.m)
    y[pattern] = 1.0
    assignment = interpolation_assignment(model, x, y)
    if verify_assignment(model, assignment):
        return None
    return assignment


def solve(model: ModelIR, limits: SolveLimits = SolveLimits()) -> SolveResult:
    """Search the indicator tree for a verified feasible assignment.

    Children of a branch node are ordered so the strict branch (y = 0) is
    explored before the tie branch (y = 1): ties between distinct payoffs are
    rare in generated games, so strict patterns usually resolve faster.
    """
    if not isinstance(model, ModelIR):
        raise TypeError(f"expected ModelIR, got {type(model).__name__}")
    t0 = time.perf_counter()
    stats = SolveStats()
    base_bounds = model.bounds_array()
    eps1, eps2 = (
        _pattern_margins(model) if model.y_indices else (np.zeros(0), np.zeros(0))
    )

    def elapsed_ms() -> float:
        return (time.perf_counter() - t0) * 1000.0

    def finish(status: SolveStatus, assignment=None) -> SolveResult:
        stats.wall_ms = elapsed_ms()
        return SolveResult(status, assignment, stats)

    if not model.y_indices:
        # Degenerate model without branch indicators: a single LP decides it.
        point = lp_relax(model.rows, base_bounds)
        stats.nodes = 1
        if point is None:
            return finish(SolveStatus.INFEASIBLE)
        assignment = interpolation_assignment(model, point[model.x_indices])
        if verify_assignment(model, assignment):
            return finish(SolveStatus.INFEASIBLE)
        return finish(SolveStatus.FEASIBLE, assignment)

    stack: list[dict[int, int]] = [{}]
    while stack:
        if stats.nodes >= limits.max_nodes or elapsed_ms() >= limits.max_time_ms:
            return finish(SolveStatus.LIMIT_REACHED)
        fixes = stack.pop()
        stats.nodes += 1

        bounds = base_bounds.copy()
        for j, v in fixes.items():
            yi = model.y_indices[j]
            bounds[yi, 0] = bounds[yi, 1] = float(v)
        status, point, iters = lp_solve(model.rows, bounds)
        stats.lp_iterations += iters
        if status != "feasible":
            continue

        yvals = point[model.y_indices]
        unfixed = [j for j in range(model.m) if j not in fixes]
        fractional = [j for j in unfixed if min(yvals[j], 1.0 - yvals[j]) > _INT_TOL]
        if fractional:
            j = min(fractional, key=lambda jj: (abs(yvals[jj] - 0.5), jj))
            stack.append({**fixes, j: 1})
            stack.append({**fixes, j: 0})
            continue

        pattern_set = {
            j: fixes.get(j, int(round(yvals[j]))) for j in range(model.m)
        }
        assignment = _attempt_pattern(model, pattern_set, base_bounds, stats, eps1, eps2)
        if assignment is not None:
            return finish(SolveStatus.FEASIBLE, assignment)
        if not unfixed:
            continue  # the pattern is refuted and fully pinned: dead end
        j = unfixed[0]
        stack.append({**fixes, j: 1})
        stack.append({**fixes, j: 0})

    return finish(SolveStatus.INFEASIBLE)


def extract_strategy(result: SolveResult, m: int) -> MixedStrategy:
    """Read the strategy out of a feasible assignment, clamping solver dust.

    Components below -1e-6 indicate a genuinely broken assignment and raise;
    smaller negative values are clamped to zero before renormalizing.
    """
    if result.status != SolveStatus.FEASIBLE or result.assignment is None:
        raise ValueError(f"cannot extract a strategy from status {result.status}")
    probs = np.empty(m)
    for i in range(m):
        try:
            probs[i] = result.assignment[f"x_{i}"]
        except KeyError:
            raise ValueError(f"assignment lacks component x_{i}") from None
    if probs.min() < -1e-6:
        raise ValueError(f"strategy component {probs.min()!r} below tolerance")
    probs = np.clip(probs, 0.0, None)
    return MixedStrategy(probs / probs.sum())
