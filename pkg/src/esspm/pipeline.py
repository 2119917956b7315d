"""Solve pipeline and batch harness: generate games, solve them, aggregate statistics.

The per-game pipeline normalizes payoffs, runs the pure-strategy preprocessing
pass, and only forwards games without a pure solution to the configured
solver(s). Batches assign each game a derived seed (base + index) so any single
instance can be regenerated in isolation, and emit one CSV row per game.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field

import numpy as np

from .analysis import Tolerances, approximation_error, find_pure_esspm, nash_epsilon
from .enumeration import EsspmCertificate, enumerate_esspm
from .game import GameMatrix, MixedStrategy, normalize, read_game
from .generators import (
    cancer_game,
    chicken,
    counterexample_game,
    mutation_population,
    random_cancer_params,
    rock_paper_scissors,
    uniform_random,
)
from .model import BuildParams, build_model, linearization_error_bound
from .solver import SolveLimits, SolveStatus, extract_strategy, solve

__all__ = [
    "PureEsspm",
    "MixedEsspm",
    "Infeasible",
    "LimitReached",
    "EsspmOutcome",
    "BatchConfig",
    "BatchStats",
    "GameRecord",
    "CSV_COLUMNS",
    "make_game",
    "solve_one",
    "solve_record",
    "run_batch",
]

GAME_CLASSES = ("uniform", "chicken", "cancer", "mp", "rps", "counterexample", "file")

CSV_COLUMNS = [
    "game_id",
    "class",
    "m",
    "k",
    "eps",
    "delta",
    "method",
    "status",
    "support_size",
    "strategy",
    "error",
    "nash_eps",
    "runtime_ms",
    "disagreement",
]


@dataclass(frozen=True)
class PureEsspm:
    index: int


@dataclass(frozen=True)
class MixedEsspm:
    strategy: MixedStrategy
    error: float


@dataclass(frozen=True)
class Infeasible:
    pass


@dataclass(frozen=True)
class LimitReached:
    pass


EsspmOutcome = PureEsspm | MixedEsspm | Infeasible | LimitReached


@dataclass(frozen=True)
class BatchConfig:
    game_class: str = "uniform"
    m: int = 2
    n_games: int = 1
    seed: int = 0
    k: int = 20
    eps: float = 1e-5
    delta: float = 1e-7
    solver: str = "milp"
    limits: SolveLimits = field(default_factory=SolveLimits)
    out_path: str | None = None
    game_file: str | None = None

    def __post_init__(self) -> None:
        if self.game_class not in GAME_CLASSES:
            raise ValueError(f"unknown game class {self.game_class!r}")
        if self.n_games < 1:
            raise ValueError("n_games must be >= 1")
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.eps <= 0.0 or self.delta <= 0.0:
            raise ValueError("eps and delta must be positive")
        if self.solver not in ("milp", "enum", "both"):
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.game_class == "file" and not self.game_file:
            raise ValueError("game class 'file' needs game_file")

    @property
    def tolerances(self) -> Tolerances:
        return Tolerances(delta=self.delta, eps=self.eps)


@dataclass
class BatchStats:
    n_pure: int = 0
    n_optimal: int = 0
    n_infeasible: int = 0
    n_limit: int = 0
    mean_runtime_optimal_ms: float = float("nan")
    mean_runtime_infeasible_ms: float = float("nan")
    mean_error_optimal: float = float("nan")

    @property
    def total(self) -> int:
        return self.n_pure + self.n_optimal + self.n_infeasible + self.n_limit


@dataclass
class GameRecord:
    """Everything the CSV needs about one solved instance."""

    game_id: int
    game_class: str
    m: int
    outcome: EsspmOutcome
    nash_eps: float | None
    runtime_ms: float
    support_size: int | None
    disagreement: int


def make_game(cfg: BatchConfig, index: int) -> GameMatrix:
    """Instance ``index`` of the configured class, seeded with seed + index."""
    seed = (cfg.seed + index) & 0xFFFFFFFFFFFFFFFF
    if cfg.game_class == "uniform":
        return uniform_random(cfg.m, seed)
    if cfg.game_class == "chicken":
        return chicken(seed)
    if cfg.game_class == "cancer":
        return cancer_game(random_cancer_params(seed))
    if cfg.game_class == "mp":
        return mutation_population()
    if cfg.game_class == "rps":
        return rock_paper_scissors()
    if cfg.game_class == "counterexample":
        return counterexample_game()
    with open(cfg.game_file, encoding="utf-8") as fh:
        return read_game(fh.read())


def _milp_outcome(norm: GameMatrix, cfg: BatchConfig) -> EsspmOutcome:
    model = build_model(norm, BuildParams(k=cfg.k, eps=cfg.eps))
    result = solve(model, cfg.limits)
    if result.status is SolveStatus.FEASIBLE:
        strategy = extract_strategy(result, norm.m)
        return MixedEsspm(strategy, approximation_error(norm, strategy, cfg.tolerances))
    if result.status is SolveStatus.LIMIT_REACHED:
        return LimitReached()
    return Infeasible()


def _enum_outcome(
    norm: GameMatrix, cfg: BatchConfig
) -> tuple[EsspmOutcome, list[EsspmCertificate]]:
    certs = enumerate_esspm(norm, cfg.tolerances)
    if not certs:
        return Infeasible(), certs
    best = certs[0]
    return (
        MixedEsspm(best.strategy, approximation_error(norm, best.strategy, cfg.tolerances)),
        certs,
    )


def _solve_normalized(norm: GameMatrix, cfg: BatchConfig) -> tuple[EsspmOutcome, int]:
    """(outcome, disagreement flag) for a game already past preprocessing."""
    if cfg.solver == "milp":
        return _milp_outcome(norm, cfg), 0
    if cfg.solver == "enum":
        return _enum_outcome(norm, cfg)[0], 0
    milp = _milp_outcome(norm, cfg)
    enum_outcome, certs = _enum_outcome(norm, cfg)
    disagreement = 0
    resolution = cfg.eps + linearization_error_bound(norm, cfg.k)
    if isinstance(milp, Infeasible) and certs:
        # Only count the miss when the oracle's margin exceeds what the
        # model can resolve; anything finer is an expected false negative.
        if max(c.min_slack() for c in certs) > resolution:
            disagreement = 1
    elif isinstance(milp, MixedEsspm) and not certs:
        disagreement = 1
    return milp, disagreement


def solve_one(game: GameMatrix, cfg: BatchConfig) -> EsspmOutcome:
    """Normalize, try the pure-strategy preprocessing pass, then the configured solver."""
    norm = normalize(game)
    pure = find_pure_esspm(norm, cfg.tolerances)
    if pure is not None:
        return PureEsspm(pure)
    return _solve_normalized(norm, cfg)[0]


def solve_record(game: GameMatrix, cfg: BatchConfig, game_id: int = 0) -> GameRecord:
    t0 = time.perf_counter()
    norm = normalize(game)
    pure = find_pure_esspm(norm, cfg.tolerances)
    disagreement = 0
    if pure is not None:
        outcome: EsspmOutcome = PureEsspm(pure)
    else:
        outcome, disagreement = _solve_normalized(norm, cfg)
    runtime_ms = (time.perf_counter() - t0) * 1000.0

    nash: float | None = None
    support_size: int | None = None
    if isinstance(outcome, PureEsspm):
        strat = MixedStrategy.pure(outcome.index, norm.m)
        nash = nash_epsilon(norm, strat)
        support_size = 1
    elif isinstance(outcome, MixedEsspm):
        nash = nash_epsilon(norm, outcome.strategy)
        support_size = len(outcome.strategy.support())
    return GameRecord(
        game_id=game_id,
        game_class=cfg.game_class,
        m=game.m,
        outcome=outcome,
        nash_eps=nash,
        runtime_ms=runtime_ms,
        support_size=support_size,
        disagreement=disagreement,
    )


def _status_name(outcome: EsspmOutcome) -> str:
    if isinstance(outcome, PureEsspm):
        return "PURE"
    if isinstance(outcome, MixedEsspm):
        return "OPTIMAL"
    if isinstance(outcome, Infeasible):
        return "INFEASIBLE"
    return "LIMIT"


def _csv_row(record: GameRecord, cfg: BatchConfig) -> list:
    outcome = record.outcome
    strategy = ""
    error = ""
    if isinstance(outcome, PureEsspm):
        probs = MixedStrategy.pure(outcome.index, record.m).probs
        strategy = ";".join(f"{p:.9g}" for p in probs)
        error = f"{0.0:.9g}"
    elif isinstance(outcome, MixedEsspm):
        strategy = ";".join(f"{p:.9g}" for p in outcome.strategy.probs)
        error = f"{outcome.error:.9g}"
    return [
        record.game_id,
        record.game_class,
        record.m,
        cfg.k,
        f"{cfg.eps:.9g}",
        f"{cfg.delta:.9g}",
        cfg.solver,
        _status_name(outcome),
        "" if record.support_size is None else record.support_size,
        strategy,
        error,
        "" if record.nash_eps is None else f"{record.nash_eps:.9g}",
        f"{record.runtime_ms:.3f}",
        record.disagreement,
    ]


def run_batch(cfg: BatchConfig, out=None) -> BatchStats:
    """Generate and solve ``cfg.n_games`` instances, writing one CSV row each.

    ``out`` may be any text stream; when omitted, ``cfg.out_path`` is opened.
    Rows appear in game-index order and, runtime column aside, rerunning the
    same config reproduces the file exactly.
    """
    own_handle = False
    if out is None:
        if cfg.out_path is None:
            out = io.StringIO()
        else:
            out = open(cfg.out_path, "w", encoding="utf-8", newline="")
            own_handle = True
    try:
        writer = csv.writer(out)
        writer.writerow(CSV_COLUMNS)
        stats = BatchStats()
        opt_times: list[float] = []
        inf_times: list[float] = []
        opt_errors: list[float] = []
        for i in range(cfg.n_games):
            record = solve_record(make_game(cfg, i), cfg, i)
            writer.writerow(_csv_row(record, cfg))
            outcome = record.outcome
            if isinstance(outcome, PureEsspm):
                stats.n_pure += 1
            elif isinstance(outcome, MixedEsspm):
                stats.n_optimal += 1
                opt_times.append(record.runtime_ms)
                opt_errors.append(outcome.error)
            elif isinstance(outcome, Infeasible):
                stats.n_infeasible += 1
                inf_times.append(record.runtime_ms)
            else:
                stats.n_limit += 1
        if opt_times:
            stats.mean_runtime_optimal_ms = float(np.mean(opt_times))
            stats.mean_error_optimal = float(np.mean(opt_errors))
        if inf_times:
            stats.mean_runtime_infeasible_ms = float(np.mean(inf_times))
        return stats
    finally:
        if own_handle:
            out.close()
