import numpy as np
import pytest

from esspm import (
    GameMatrix,
    Support,
    Tolerances,
    approximation_error,
    counterexample_game,
    enumerate_esspm,
    mutation_population,
    nash_epsilon,
    normalize,
    rock_paper_scissors,
    solve_support,
    uniform_random,
)


class TestSolveSupport:
    def test_mp_full_support(self):
        strat = solve_support(mutation_population(), Support((0, 1)))
        np.testing.assert_allclose(strat.probs, [0.2, 0.8], atol=1e-12)

    def test_counterexample_bc_support(self):
        # Ties require 4 - 4p = 4p, so p = 1/2 on each of B and C.
        strat = solve_support(counterexample_game(), Support((1, 2)))
        np.testing.assert_allclose(strat.probs, [0.0, 0.5, 0.5], atol=1e-12)

    def test_rps_pair_has_no_solution(self):
        assert solve_support(rock_paper_scissors(), Support((0, 1))) is None

    def test_singleton_support(self):
        strat = solve_support(mutation_population(), Support((1,)))
        np.testing.assert_array_equal(strat.probs, [0.0, 1.0])

    def test_out_of_range_support(self):
        with pytest.raises(ValueError):
            solve_support(mutation_population(), Support((0, 5)))


class TestEnumerate:
    def test_mp_exactly_one_certificate(self):
        certs = enumerate_esspm(mutation_population())
        assert len(certs) == 1
        np.testing.assert_allclose(certs[0].strategy.probs, [0.2, 0.8], atol=1e-12)
        assert certs[0].support.indices == (0, 1)

    def test_rps_empty(self):
        assert enumerate_esspm(rock_paper_scissors()) == []

    def test_counterexample_two_certificates(self):
        certs = enumerate_esspm(counterexample_game())
        assert len(certs) == 2
        assert certs[0].support.indices == (0,)  # pure A first (smaller support)
        assert certs[1].support.indices == (1, 2)
        np.testing.assert_allclose(certs[1].strategy.probs, [0.0, 0.5, 0.5], atol=1e-12)

    def test_visits_every_support(self):
        counters = {}
        enumerate_esspm(uniform_random(4, seed=3), counters=counters)
        assert counters["supports_visited"] == 2**4 - 1

    def test_largest_first_same_results(self):
        g = uniform_random(3, seed=8)
        a = enumerate_esspm(g)
        b = enumerate_esspm(g, largest_first=True)
        assert [c.support.indices for c in a] == [c.support.indices for c in b]

    def test_cap_enforced(self):
        g = uniform_random(4, seed=1)
        with pytest.raises(ValueError, match="cap"):
            enumerate_esspm(g, max_m=3)


class TestCertificates:
    def test_certificates_are_exact_on_normalized_games(self):
        tol = Tolerances()
        rng = np.random.default_rng(40)
        seen = 0
        for _ in range(60):
            m = int(rng.integers(2, 5))
            norm = normalize(GameMatrix(rng.random((m, m))))
            for cert in enumerate_esspm(norm, tol):
                assert approximation_error(norm, cert.strategy, tol) == 0.0
                assert nash_epsilon(norm, cert.strategy) <= 10.0 * tol.delta
                assert all(o.holds for o in cert.per_mutation)
                seen += 1
        assert seen >= 40

    def test_support_matches_nonzero_pattern(self):
        rng = np.random.default_rng(41)
        for _ in range(40):
            m = int(rng.integers(2, 5))
            g = GameMatrix(rng.random((m, m)))
            for cert in enumerate_esspm(g):
                assert cert.strategy.support().indices == cert.support.indices

    def test_min_slack_positive(self):
        for cert in enumerate_esspm(mutation_population()):
            assert cert.min_slack() > 0.0
