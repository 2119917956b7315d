import numpy as np
import pytest
from scipy.optimize import linprog

from esspm import BuildParams, build_model, lp_relax, mutation_population, normalize
from esspm.simplex import SolverError, lp_solve


def rows_satisfied(rows, x, tol=1e-7):
    for coeffs, rel, rhs in rows:
        lhs = sum(c * x[i] for i, c in coeffs.items())
        if rel == "<=" and lhs > rhs + tol:
            return False
        if rel == ">=" and lhs < rhs - tol:
            return False
        if rel == "=" and abs(lhs - rhs) > tol:
            return False
    return True


class TestFeasibility:
    def test_simplex_face(self):
        rows = [({0: 1.0, 1: 1.0}, "=", 1.0)]
        x = lp_relax(rows, [[0, 1], [0, 1]])
        assert x is not None
        assert x[0] + x[1] == pytest.approx(1.0, abs=1e-9)

    def test_overcommitted_sum_infeasible(self):
        rows = [
            ({0: 1.0}, ">=", 0.6),
            ({1: 1.0}, ">=", 0.6),
            ({0: 1.0, 1: 1.0}, "=", 1.0),
        ]
        assert lp_relax(rows, [[0, 1], [0, 1]]) is None

    def test_mp_root_relaxation_feasible(self):
        model = build_model(normalize(mutation_population()), BuildParams(k=20))
        x = lp_relax(model.rows, model.bounds_array())
        assert x is not None
        assert rows_satisfied([(r.coeffs, r.rel, r.rhs) for r in model.rows], x)

    def test_upper_bounds_respected(self):
        rows = [({0: 1.0, 1: 1.0}, ">=", 1.2)]
        x = lp_relax(rows, [[0, 1], [0, 0.4]])
        assert x is not None
        assert x[1] <= 0.4 + 1e-9
        assert x[0] + x[1] >= 1.2 - 1e-9

    def test_upper_bounds_make_it_infeasible(self):
        rows = [({0: 1.0, 1: 1.0}, ">=", 1.5)]
        assert lp_relax(rows, [[0, 1], [0, 0.4]]) is None

    def test_fixed_variables(self):
        rows = [({0: 1.0, 1: 1.0}, "=", 1.0)]
        x = lp_relax(rows, [[0.25, 0.25], [0, 1]])
        assert x is not None
        assert x[0] == pytest.approx(0.25)
        assert x[1] == pytest.approx(0.75, abs=1e-9)

    def test_negative_lower_bounds(self):
        rows = [({0: 1.0, 1: 2.0}, "=", -1.0)]
        x = lp_relax(rows, [[-2, 2], [-2, 2]])
        assert x is not None
        assert x[0] + 2 * x[1] == pytest.approx(-1.0, abs=1e-9)


class TestAgainstScipy:
    def test_random_feasibility_status_agreement(self):
        rng = np.random.default_rng(100)
        agree = 0
        for trial in range(120):
            n = int(rng.integers(2, 7))
            n_rows = int(rng.integers(1, 6))
            bounds = np.column_stack([rng.uniform(-2, 0, n), rng.uniform(0.1, 2, n)])
            rows = []
            a_ub, b_ub, a_eq, b_eq = [], [], [], []
            for _ in range(n_rows):
                coefs = rng.normal(size=n)
                rhs = float(rng.normal())
                rel = ["<=", ">=", "="][int(rng.integers(3))]
                rows.append(({i: float(c) for i, c in enumerate(coefs)}, rel, rhs))
                if rel == "<=":
                    a_ub.append(coefs)
                    b_ub.append(rhs)
                elif rel == ">=":
                    a_ub.append(-coefs)
                    b_ub.append(-rhs)
                else:
                    a_eq.append(coefs)
                    b_eq.append(rhs)
            ref = linprog(
                np.zeros(n),
                A_ub=np.array(a_ub) if a_ub else None,
                b_ub=np.array(b_ub) if b_ub else None,
                A_eq=np.array(a_eq) if a_eq else None,
                b_eq=np.array(b_eq) if b_eq else None,
                bounds=bounds.tolist(),
                method="highs",
            )
            ours = lp_relax(rows, bounds)
            assert (ours is not None) == ref.success, f"trial {trial}"
            if ours is not None:
                assert rows_satisfied(rows, ours)
                agree += 1
        assert agree > 30  # sanity: the sample contains plenty of feasible systems

    def test_phase_two_objective_agreement(self):
        rng = np.random.default_rng(200)
        for trial in range(60):
            n = int(rng.integers(2, 6))
            bounds = np.column_stack([np.zeros(n), rng.uniform(0.5, 2, n)])
            coefs = rng.uniform(0.2, 1.0, n)
            rhs = float(rng.uniform(0.5, coefs.sum() * 0.9))
            rows = [({i: float(c) for i, c in enumerate(coefs)}, "=", rhs)]
            c = rng.normal(size=n)
            status, x, _ = lp_solve(rows, bounds, objective=c)
            assert status == "feasible"
            ref = linprog(
                c,
                A_eq=np.array([coefs]),
                b_eq=np.array([rhs]),
                bounds=bounds.tolist(),
                method="highs",
            )
            assert ref.success
            assert c @ x == pytest.approx(ref.fun, abs=1e-7), f"trial {trial}"


class TestDegeneracy:
    def test_beale_cycling_example_terminates(self):
        # Classic cycling instance for the textbook pivot rule; the stall
        # detector must hand control to Bland's rule and finish.
        rows = [
            ({0: 0.25, 1: -8.0, 2: -1.0, 3: 9.0}, "<=", 0.0),
            ({0: 0.5, 1: -12.0, 2: -0.5, 3: 3.0}, "<=", 0.0),
            ({2: 1.0}, "<=", 1.0),
        ]
        bounds = [[0, 10]] * 4
        c = np.array([-0.75, 150.0, -0.02, 6.0])
        status, x, _ = lp_solve(rows, bounds, objective=c)
        assert status == "feasible"
        ref = linprog(
            c,
            A_ub=np.array(
                [[0.25, -8, -1, 9], [0.5, -12, -0.5, 3], [0, 0, 1, 0]]
            ),
            b_ub=np.array([0.0, 0.0, 1.0]),
            bounds=[(0, 10)] * 4,
            method="highs",
        )
        assert c @ x == pytest.approx(ref.fun, abs=1e-6)

    def test_iteration_cap_raises(self):
        rows = [({0: 1.0, 1: 1.0}, "=", 1.0)]
        with pytest.raises(SolverError, match="iteration limit"):
            lp_solve(rows, [[0, 1], [0, 1]], max_iter=0)
