import numpy as np
import pytest

from esspm import (
    CancerParams,
    cancer_game,
    chicken,
    counterexample_game,
    find_pure_esspm,
    mutation_population,
    random_cancer_params,
    rock_paper_scissors,
    uniform_random,
)


class TestFixedGames:
    def test_mutation_population_entries(self):
        mp = mutation_population()
        assert mp.payoffs[0, 0] == 4.0  # Dove vs Dove
        assert mp.payoffs[1, 0] == 8.0  # Hawk vs Dove

    def test_mp_satisfies_chicken_ordering(self):
        a = mutation_population().payoffs
        assert a[1, 0] > a[0, 0] > a[0, 1] > a[1, 1]

    def test_mp_has_no_pure_solution(self):
        assert find_pure_esspm(mutation_population()) is None

    def test_counterexample_entries(self):
        g = counterexample_game()
        assert g.payoffs[1, 0] == 2.0  # B vs A
        assert g.payoffs[1, 2] == 4.0  # B vs C

    def test_counterexample_pure_solution_is_a(self):
        assert find_pure_esspm(counterexample_game()) == 0

    def test_rps_entries(self):
        g = rock_paper_scissors()
        assert g.payoffs[0, 2] == 1.0  # rock beats scissors
        assert g.payoffs[2, 0] == 0.0
        assert g.payoffs[0, 0] == pytest.approx(2.0 / 3.0)

    def test_rps_row_sums(self):
        sums = rock_paper_scissors().payoffs.sum(axis=1)
        np.testing.assert_allclose(sums, 5.0 / 3.0)


class TestUniformRandom:
    def test_entries_in_range(self):
        g = uniform_random(5, seed=42)
        assert g.payoffs.min() >= 0.0 and g.payoffs.max() < 1.0

    def test_deterministic_in_seed(self):
        assert uniform_random(4, seed=9) == uniform_random(4, seed=9)
        assert uniform_random(4, seed=9) != uniform_random(4, seed=10)

    def test_rejects_small_m(self):
        with pytest.raises(ValueError):
            uniform_random(1, seed=0)

    def test_pure_fraction_near_three_quarters(self):
        # A pure solution exists exactly when some diagonal entry is its
        # column maximum; for 2x2 that is 1 - (1/2)^2 = 0.75.
        n = 2000
        hits = sum(
            find_pure_esspm(uniform_random(2, seed=1000 + i)) is not None
            for i in range(n)
        )
        assert hits / n == pytest.approx(0.75, abs=0.03)


class TestChicken:
    def test_ordering_holds_on_ten_thousand(self):
        for seed in range(10_000):
            a = chicken(seed).payoffs
            assert a[1, 0] > a[0, 0] > a[0, 1] > a[1, 1]

    def test_deterministic(self):
        assert chicken(5) == chicken(5)

    def test_never_has_pure_solution(self):
        for seed in range(100):
            assert find_pure_esspm(chicken(seed)) is None


class TestCancer:
    def test_zero_params_all_ones(self):
        g = cancer_game(CancerParams(0, 0, 0, 0, 0, 0, 0))
        np.testing.assert_array_equal(g.payoffs, np.ones((4, 4)))

    def test_half_params_spot_values(self):
        g = cancer_game(CancerParams(*([0.5] * 7)))
        assert g.payoffs[2, 3] == pytest.approx(0.75)  # (1+g)(1-c) = 1.5 * 0.5
        assert g.payoffs[1, 1] == pytest.approx(1.5)  # 1 - a + d + f

    def test_baseline_entry_constant(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            p = CancerParams(*rng.uniform(0, 0.5, 7))
            assert cancer_game(p).payoffs[0, 0] == 1.0

    def test_random_params_in_range_and_deterministic(self):
        p = random_cancer_params(seed=77)
        vals = [p.a, p.b, p.c, p.d, p.e, p.f, p.g]
        assert all(0.0 <= v <= 0.5 for v in vals)
        assert random_cancer_params(seed=77) == p

    def test_payoffs_nonnegative_and_bounded(self):
        # Largest formula is 1 + d + g <= 2 for params in [0, 0.5].
        for seed in range(200):
            g = cancer_game(random_cancer_params(seed))
            assert g.payoffs.min() >= 0.0
            assert g.payoffs.max() <= 2.0

    def test_rejects_negative_param(self):
        with pytest.raises(ValueError):
            CancerParams(-0.1, 0, 0, 0, 0, 0, 0)
