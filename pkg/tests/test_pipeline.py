import csv
import io

import numpy as np
import pytest

from esspm import (
    BatchConfig,
    Infeasible,
    MixedEsspm,
    PureEsspm,
    counterexample_game,
    mutation_population,
    rock_paper_scissors,
    run_batch,
    solve_one,
)
from esspm.pipeline import CSV_COLUMNS, make_game


def batch_csv(cfg):
    buf = io.StringIO()
    stats = run_batch(cfg, out=buf)
    buf.seek(0)
    return stats, list(csv.reader(buf))


class TestSolveOne:
    def test_counterexample_pure(self):
        out = solve_one(counterexample_game(), BatchConfig(game_class="counterexample"))
        assert out == PureEsspm(0)

    def test_mp_milp(self):
        out = solve_one(mutation_population(), BatchConfig(game_class="mp", k=20))
        assert isinstance(out, MixedEsspm)
        assert np.max(np.abs(out.strategy.probs - np.array([0.2, 0.8]))) <= 0.01
        assert out.error <= 1e-3

    def test_mp_enum(self):
        out = solve_one(
            mutation_population(), BatchConfig(game_class="mp", solver="enum")
        )
        assert isinstance(out, MixedEsspm)
        np.testing.assert_allclose(out.strategy.probs, [0.2, 0.8], atol=1e-9)

    def test_rps_both_agree_infeasible(self):
        out = solve_one(rock_paper_scissors(), BatchConfig(game_class="rps", solver="both"))
        assert isinstance(out, Infeasible)


class TestMakeGame:
    def test_seeded_per_index(self):
        cfg = BatchConfig(game_class="uniform", m=3, n_games=5, seed=100)
        assert make_game(cfg, 2) == make_game(
            BatchConfig(game_class="uniform", m=3, seed=102), 0
        )

    def test_file_class(self, tmp_path):
        path = tmp_path / "game.txt"
        path.write_text("2\n4 2\n8 1\n")
        cfg = BatchConfig(game_class="file", game_file=str(path))
        assert make_game(cfg, 0) == mutation_population()

    def test_file_class_requires_path(self):
        with pytest.raises(ValueError, match="game_file"):
            BatchConfig(game_class="file")


class TestRunBatch:
    def test_row_count_and_columns(self):
        cfg = BatchConfig(game_class="uniform", m=2, n_games=25, seed=7)
        stats, rows = batch_csv(cfg)
        assert rows[0] == CSV_COLUMNS
        assert len(rows) == 1 + cfg.n_games
        assert stats.total == cfg.n_games

    def test_counts_reconcile_with_rows(self):
        cfg = BatchConfig(game_class="uniform", m=2, n_games=30, seed=11, solver="milp")
        stats, rows = batch_csv(cfg)
        status_col = CSV_COLUMNS.index("status")
        by_status = {}
        for row in rows[1:]:
            by_status[row[status_col]] = by_status.get(row[status_col], 0) + 1
        assert by_status.get("PURE", 0) == stats.n_pure
        assert by_status.get("OPTIMAL", 0) == stats.n_optimal
        assert by_status.get("INFEASIBLE", 0) == stats.n_infeasible
        assert by_status.get("LIMIT", 0) == stats.n_limit

    def test_deterministic_apart_from_runtime(self):
        cfg = BatchConfig(game_class="uniform", m=2, n_games=15, seed=3)
        _, rows_a = batch_csv(cfg)
        _, rows_b = batch_csv(cfg)
        rt = CSV_COLUMNS.index("runtime_ms")
        strip = lambda rows: [r[:rt] + r[rt + 1 :] for r in rows]
        assert strip(rows_a) == strip(rows_b)

    def test_uniform_pure_fraction(self):
        cfg = BatchConfig(game_class="uniform", m=2, n_games=400, seed=500)
        stats, _ = batch_csv(cfg)
        assert stats.n_pure / cfg.n_games == pytest.approx(0.75, abs=0.08)

    def test_chicken_all_mixed(self):
        cfg = BatchConfig(game_class="chicken", n_games=30, seed=0, k=10)
        stats, rows = batch_csv(cfg)
        assert stats.n_pure == 0
        assert stats.n_optimal == 30
        assert stats.mean_error_optimal <= 5e-3

    def test_both_mode_marks_agreement(self):
        cfg = BatchConfig(game_class="chicken", n_games=8, seed=4, k=10, solver="both")
        _, rows = batch_csv(cfg)
        dis = CSV_COLUMNS.index("disagreement")
        assert all(row[dis] == "0" for row in rows[1:])

    def test_strategy_column_format(self):
        cfg = BatchConfig(game_class="mp", n_games=1, seed=0)
        _, rows = batch_csv(cfg)
        strat_col = CSV_COLUMNS.index("strategy")
        parts = rows[1][strat_col].split(";")
        assert len(parts) == 2
        assert float(parts[0]) == pytest.approx(0.2, abs=0.01)

    def test_writes_file(self, tmp_path):
        out = tmp_path / "r.csv"
        cfg = BatchConfig(game_class="mp", n_games=2, seed=0, out_path=str(out))
        run_batch(cfg)
        content = out.read_text()
        assert content.count("\n") == 3  # header + 2 rows


class TestConfigValidation:
    def test_bad_class(self):
        with pytest.raises(ValueError):
            BatchConfig(game_class="poker")

    def test_bad_solver(self):
        with pytest.raises(ValueError):
            BatchConfig(solver="annealing")

    def test_bad_counts(self):
        with pytest.raises(ValueError):
            BatchConfig(n_games=0)
        with pytest.raises(ValueError):
            BatchConfig(k=1)
