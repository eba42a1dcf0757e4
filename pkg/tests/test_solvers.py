import numpy as np
import pytest

from fouriercal.operators import FrequencySet, build_matrix, centered_indices
from fouriercal.solvers import (SolverConfig, default_lambda, kkt_residual,
                                real_stack, solve_bp, solve_sqlasso)

from oracles import sqlasso_coordinate_descent, sqlasso_objective


def random_complex(rng, shape, scale=1.0):
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


class TestRealStack:
    def test_imaginary_identity(self):
        a = 1j * np.eye(2)
        y = 1j * np.array([1.0, 2.0])
        a_s, y_s = real_stack(a, y)
        assert np.array_equal(a_s, np.vstack([np.zeros((2, 2)), np.eye(2)]))
        assert np.array_equal(y_s, np.array([0.0, 0.0, 1.0, 2.0]))

    def test_norm_preservation(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            a = random_complex(rng, (5, 4))
            y = random_complex(rng, 5)
            x = rng.standard_normal(4)
            a_s, y_s = real_stack(a, y)
            lhs = np.linalg.norm(y - a @ x)
            rhs = np.linalg.norm(y_s - a_s @ x)
            assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_real_input_bottom_zero(self):
        a = np.eye(3) + 0j
        y = np.arange(3.0) + 0j
        a_s, y_s = real_stack(a, y)
        assert np.abs(a_s[3:]).max() == 0.0
        assert np.abs(y_s[3:]).max() == 0.0

    def test_mismatch(self):
        with pytest.raises(ValueError):
            real_stack(np.eye(2), np.zeros(3))


class TestSolverConfig:
    def test_rejects_bad_lambda(self):
        with pytest.raises(ValueError):
            SolverConfig(lam=0.0)

    def test_rejects_bad_tol(self):
        with pytest.raises(ValueError):
            SolverConfig(lam=1.0, tol=0.0)


class TestSolveSqlasso:
    def test_zero_measurements(self):
        rng = np.random.default_rng(1)
        a = random_complex(rng, (4, 6))
        rep = solve_sqlasso(a, np.zeros(4), SolverConfig(lam=1.0))
        assert np.abs(rep.x_hat).max() == 0.0
        assert rep.objective == 0.0

    def test_large_lambda_orthonormal(self):
        # full integer grid: orthonormal rows, noiseless data
        n = 16
        u = centered_indices(n).astype(float)
        a = build_matrix(FrequencySet(u, np.zeros(n)), n).entries
        x0 = np.zeros(n)
        x0[[2, 9, 13]] = [1.5, -2.0, 0.7]
        rep = solve_sqlasso(a, a @ x0, SolverConfig(lam=1e6))
        assert np.linalg.norm(rep.x_hat - x0) / np.linalg.norm(x0) < 1e-4

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_objective_matches_cd_reference(self, seed):
        rng = np.random.default_rng(seed)
        m = n = 6
        a = random_complex(rng, (m, n)) / np.sqrt(m)
        x0 = np.zeros(n)
        x0[rng.choice(n, 2, replace=False)] = rng.standard_normal(2)
        y = a @ x0 + random_complex(rng, m, scale=0.05)
        lam = 2.0
        rep = solve_sqlasso(a, y, SolverConfig(lam=lam))
        x_ref = sqlasso_coordinate_descent(a, y, lam)
        j_ref = sqlasso_objective(a, y, lam, x_ref)
        assert rep.objective == pytest.approx(j_ref, rel=1e-6)

    def test_warm_start_never_worse(self):
        rng = np.random.default_rng(3)
        a = random_complex(rng, (10, 20)) / np.sqrt(10)
        y = random_complex(rng, 10)
        lam = 3.0
        x0 = rng.standard_normal(20)
        rep = solve_sqlasso(a, y, SolverConfig(lam=lam), x0=x0)
        assert rep.objective <= sqlasso_objective(a, y, lam, x0) + 1e-10

    def test_objective_below_zero_point(self):
        rng = np.random.default_rng(4)
        a = random_complex(rng, (8, 12)) / np.sqrt(8)
        y = random_complex(rng, 8)
        lam = 2.5
        rep = solve_sqlasso(a, y, SolverConfig(lam=lam))
        assert rep.objective <= lam * np.linalg.norm(y) + 1e-10

    def test_report_objective_consistent(self):
        rng = np.random.default_rng(5)
        a = random_complex(rng, (12, 8)) / np.sqrt(12)
        y = random_complex(rng, 12)
        rep = solve_sqlasso(a, y, SolverConfig(lam=2.0))
        assert rep.objective == pytest.approx(
            sqlasso_objective(a, y, 2.0, rep.x_hat), abs=1e-10)

    def test_homogeneity_in_y(self):
        # scaling y by c > 0 scales the solution by c at fixed lam
        rng = np.random.default_rng(6)
        a = random_complex(rng, (12, 16)) / np.sqrt(12)
        x0 = np.zeros(16)
        x0[[1, 7, 11]] = [1.0, -0.5, 2.0]
        y = a @ x0 + random_complex(rng, 12, scale=0.02)
        cfg = SolverConfig(lam=4.0)
        base = solve_sqlasso(a, y, cfg).x_hat
        scaled = solve_sqlasso(a, 3.7 * y, cfg).x_hat
        assert np.linalg.norm(scaled - 3.7 * base) <= 1e-6 * np.linalg.norm(base) * 3.7 + 1e-8

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            solve_sqlasso(np.eye(3) + 0j, np.zeros(2), SolverConfig(lam=1.0))

    def test_zero_matrix_rejected(self):
        with pytest.raises(ValueError):
            solve_sqlasso(np.zeros((3, 3)), np.ones(3) + 0j, SolverConfig(lam=1.0))


class TestSolveBP:
    def test_single_spike_full_grid(self):
        n = 16
        u = centered_indices(n).astype(float)
        a = build_matrix(FrequencySet(u, np.zeros(n)), n).entries
        x0 = np.zeros(n)
        x0[5] = 2.0
        rep = solve_bp(a, a @ x0, SolverConfig(lam=default_lambda(n)))
        assert np.linalg.norm(rep.x_hat - x0) < 1e-6

    def test_same_engine_as_sqlasso(self):
        rng = np.random.default_rng(7)
        a = random_complex(rng, (6, 9)) / np.sqrt(6)
        y = random_complex(rng, 6)
        cfg = SolverConfig(lam=2.0)
        assert np.array_equal(solve_bp(a, y, cfg).x_hat,
                              solve_sqlasso(a, y, cfg).x_hat)


class TestKKTResidual:
    def test_scalar_closed_form(self):
        # 1x1 system: J(x) = |x| + lam*|y - a x|; for lam*|a| > 1 the
        # minimizer interpolates (x = y/a), certified by the zero-residual
        # branch.
        a = np.array([[2.0 + 0j]])
        y = np.array([3.0 + 0j])
        lam = 5.0
        x_star = np.array([1.5])
        assert kkt_residual(a, y, lam, x_star) < 1e-8

    def test_zero_solution_small_lambda(self):
        rng = np.random.default_rng(8)
        a = random_complex(rng, (5, 7))
        y = random_complex(rng, 5)
        a_s, y_s = real_stack(a, y)
        g = a_s.T @ y_s / np.linalg.norm(y_s)
        lam = 0.5 / np.abs(g).max()
        assert kkt_residual(a, y, lam, np.zeros(7)) == 0.0

    def test_non_optimal_point_positive(self):
        rng = np.random.default_rng(9)
        a = random_complex(rng, (6, 6))
        y = random_complex(rng, 6)
        x_bad = rng.standard_normal(6) * 10
        assert kkt_residual(a, y, 2.0, x_bad) > 0.0

    def test_solver_output_certified(self):
        rng = np.random.default_rng(10)
        for trial in range(10):
            n = 24
            m = 16
            a = random_complex(rng, (m, n)) / np.sqrt(m)
            x0 = np.zeros(n)
            x0[rng.choice(n, 3, replace=False)] = rng.standard_normal(3)
            y = a @ x0 + random_complex(rng, m, scale=0.03)
            rep = solve_sqlasso(a, y, SolverConfig(lam=4.0))
            assert rep.kkt_violation <= 1e-4
