"""Command-line front end: generate games, solve them, run batches, export models."""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .game import normalize, write_game
from .model import BuildParams, build_model, export_lp
from .pipeline import (
    BatchConfig,
    GAME_CLASSES,
    Infeasible,
    MixedEsspm,
    PureEsspm,
    make_game,
    run_batch,
    solve_record,
)
from .simplex import SolverError
from .solver import SolveLimits

__all__ = ["cli_main", "main"]


def _add_game_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--class", dest="game_class", choices=GAME_CLASSES, default="uniform")
    p.add_argument("--m", type=int, default=2, help="pure strategies per player")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--game-file", help="path to a game in the text format (class 'file')")


def _add_solve_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=20, help="breakpoint segments per square term")
    p.add_argument("--eps", type=float, default=1e-5, help="strict-inequality margin")
    p.add_argument("--delta", type=float, default=1e-7, help="payoff-equality precision")
    p.add_argument("--solver", choices=("milp", "enum", "both"), default="milp")
    p.add_argument("--max-nodes", type=int, default=100_000)
    p.add_argument("--max-time-ms", type=int, default=600_000)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esspm",
        description="Compute evolutionarily stable strategies against pure mutations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a game and write it in the text format")
    _add_game_source(gen)
    gen.add_argument("--out", help="output path (default: stdout)")

    solve_p = sub.add_parser("solve", help="solve a single game")
    _add_game_source(solve_p)
    _add_solve_params(solve_p)

    batch = sub.add_parser("batch", help="generate and solve many games, writing a CSV")
    _add_game_source(batch)
    _add_solve_params(batch)
    batch.add_argument("--n", type=int, default=100, help="number of games")
    batch.add_argument("--out", required=True, help="CSV output path")

    export = sub.add_parser("export-lp", help="write the feasibility model in LP format")
    _add_game_source(export)
    export.add_argument("--k", type=int, default=20)
    export.add_argument("--eps", type=float, default=1e-5)
    export.add_argument("--out", required=True, help="LP output path")
    return parser


def _config(args: argparse.Namespace, n_games: int = 1) -> BatchConfig:
    return BatchConfig(
        game_class=args.game_class,
        m=args.m,
        n_games=n_games,
        seed=args.seed,
        k=args.k,
        eps=args.eps,
        delta=args.delta,
        solver=args.solver,
        limits=SolveLimits(max_nodes=args.max_nodes, max_time_ms=args.max_time_ms),
        game_file=args.game_file,
    )


def _cmd_gen(args: argparse.Namespace) -> int:
    cfg = BatchConfig(
        game_class=args.game_class, m=args.m, seed=args.seed, game_file=args.game_file
    )
    text = write_game(make_game(cfg, 0))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    cfg = _config(args)
    game = make_game(cfg, 0)
    record = solve_record(game, cfg)
    outcome = record.outcome
    if isinstance(outcome, PureEsspm):
        print("status: PURE")
        print(f"strategy: pure {outcome.index}")
    elif isinstance(outcome, MixedEsspm):
        print("status: OPTIMAL")
        print("strategy: " + ";".join(f"{p:.9g}" for p in outcome.strategy.probs))
        print(f"error: {outcome.error:.9g}")
    elif isinstance(outcome, Infeasible):
        print("status: INFEASIBLE")
    else:
        print("status: LIMIT")
        return 1
    if cfg.solver == "both" and not isinstance(outcome, PureEsspm):
        print("oracle agreement: " + ("no" if record.disagreement else "yes"))
    return 0


def _cmd_batch(args: argparse.Namespace) -> int:
    cfg = dataclasses.replace(_config(args, n_games=args.n), out_path=args.out)
    stats = run_batch(cfg)
    print(
        f"games={cfg.n_games} pure={stats.n_pure} optimal={stats.n_optimal} "
        f"infeasible={stats.n_infeasible} limit={stats.n_limit}"
    )
    if stats.n_optimal:
        print(
            f"mean_runtime_optimal_ms={stats.mean_runtime_optimal_ms:.3f} "
            f"mean_error_optimal={stats.mean_error_optimal:.3g}"
        )
    if stats.n_infeasible:
        print(f"mean_runtime_infeasible_ms={stats.mean_runtime_infeasible_ms:.3f}")
    return 0


def _cmd_export(args: argparse.Namespace) -> int:
    cfg = BatchConfig(
        game_class=args.game_class,
        m=args.m,
        seed=args.seed,
        k=args.k,
        eps=args.eps,
        game_file=args.game_file,
    )
    game = make_game(cfg, 0)
    model = build_model(normalize(game), BuildParams(k=args.k, eps=args.eps))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(export_lp(model))
    print(f"wrote {args.out}")
    return 0


def cli_main(argv: list[str] | None = None) -> int:
    """Entry point; returns 0 on success, 1 on solver failure, 2 on usage errors."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "gen": _cmd_gen,
        "solve": _cmd_solve,
        "batch": _cmd_batch,
        "export-lp": _cmd_export,
    }
    try:
        return handlers[args.command](args)
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())
