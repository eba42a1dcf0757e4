import numpy as np
import pytest

from fouriercal.bases import SparsityBasis
from fouriercal.experiments import (gen_antisymmetric_frequencies,
                                    gen_sparse_signal)
from fouriercal.linearized import (DegenerateMeasurements, SingularH,
                                   forward_linearized,
                                   solve_linearized_compressive,
                                   solve_linearized_exact)
from fouriercal.operators import (FrequencySet, build_matrix,
                                  derivative_matrix, forward)
from fouriercal.solvers import SolverConfig, solve_bp


def antisym(n, seed, r=0.5):
    return gen_antisymmetric_frequencies(n, n, seed, r=r)


def mixed_parity_signal(rng, n):
    x = rng.standard_normal(n)
    return x


class TestForwardLinearized:
    def test_zero_delta_equals_forward(self):
        n = 11
        freq = antisym(n, 0)
        rng = np.random.default_rng(0)
        x = rng.standard_normal(n)
        y_lin = forward_linearized(x, np.zeros(n), freq)
        y_true = forward(x, freq)
        assert np.abs(y_lin - y_true).max() < 1e-12

    def test_second_order_gap(self):
        # halving delta shrinks the model error by ~4x
        n = 11
        freq = antisym(n, 1)
        rng = np.random.default_rng(1)
        x = rng.standard_normal(n)
        d = rng.uniform(-1, 1, n)
        gaps = []
        for scale in (0.02, 0.01):
            delta = scale * d
            true = forward(x, freq.with_delta(np.clip(delta, -0.5, 0.5)))
            lin = forward_linearized(x, delta, freq)
            gaps.append(np.linalg.norm(true - lin))
        ratio = gaps[0] / gaps[1]
        assert 3.0 < ratio < 5.0

    def test_dense_hand_built_system(self):
        n = 5
        freq = antisym(n, 2)
        rng = np.random.default_rng(2)
        x = rng.standard_normal(n)
        delta = rng.uniform(-0.3, 0.3, n)
        f = build_matrix(freq, n).entries
        fp = derivative_matrix(freq.u, n).entries
        manual = f @ x - 1j * (np.diag(delta) @ fp) @ x
        assert np.abs(forward_linearized(x, delta, freq) - manual).max() < 1e-12

    def test_rejects_even_n(self):
        freq = gen_antisymmetric_frequencies(4, 4, 0)
        with pytest.raises(ValueError):
            forward_linearized(np.zeros(4), np.zeros(4), freq)

    def test_rejects_asymmetric_frequencies(self):
        u = np.array([-2.0, 0.5, 1.0])
        freq = FrequencySet(u, np.zeros(3))
        with pytest.raises(ValueError):
            forward_linearized(np.zeros(3), np.zeros(3), freq)


class TestSolveLinearizedExact:
    def test_round_trip_n41(self):
        worst_x = worst_d = 0.0
        for trial in range(20):
            rng = np.random.default_rng(100 + trial)
            n = 41
            freq = antisym(n, 1000 + trial)
            x = mixed_parity_signal(rng, n)
            delta = rng.uniform(-0.5, 0.5, n)
            y = forward_linearized(x, delta, freq)
            sol = solve_linearized_exact(y, freq)
            worst_x = max(worst_x,
                          np.linalg.norm(sol.x_hat - x) / np.linalg.norm(x))
            worst_d = max(worst_d,
                          np.abs(sol.delta_hat - delta)[sol.delta_reliable].max())
        assert worst_x < 1e-8
        assert worst_d < 1e-6

    def test_reproduces_measurements(self):
        rng = np.random.default_rng(3)
        n = 21
        freq = antisym(n, 3)
        x = rng.standard_normal(n)
        delta = rng.uniform(-0.5, 0.5, n)
        y = forward_linearized(x, delta, freq)
        sol = solve_linearized_exact(y, freq)
        y_back = forward_linearized(sol.x_hat, sol.delta_hat, freq)
        assert np.linalg.norm(y_back - y) / np.linalg.norm(y) < 1e-8

    def test_purely_even_signal_degenerate(self):
        n = 21
        freq = antisym(n, 4)
        rng = np.random.default_rng(4)
        half = rng.standard_normal(n // 2)
        x = np.concatenate([half[::-1], [rng.standard_normal()], half])
        delta = rng.uniform(-0.5, 0.5, n)
        y = forward_linearized(x, delta, freq)
        with pytest.raises(DegenerateMeasurements):
            solve_linearized_exact(y, freq)

    def test_purely_odd_signal_degenerate(self):
        n = 21
        freq = antisym(n, 5)
        rng = np.random.default_rng(5)
        half = rng.standard_normal(n // 2)
        x = np.concatenate([-half[::-1], [0.0], half])
        delta = rng.uniform(-0.5, 0.5, n)
        y = forward_linearized(x, delta, freq)
        with pytest.raises(DegenerateMeasurements):
            solve_linearized_exact(y, freq)

    def test_cancelling_perturbations_degenerate(self):
        # delta[p] = -delta[q] for one pair annihilates its ratio equation
        n = 21
        freq = antisym(n, 6)
        rng = np.random.default_rng(6)
        x = mixed_parity_signal(rng, n)
        delta = rng.uniform(-0.4, 0.4, n)
        delta[0] = -delta[-1]
        y = forward_linearized(x, delta, freq)
        with pytest.raises(DegenerateMeasurements):
            solve_linearized_exact(y, freq)

    def test_even_m_rejected(self):
        freq = gen_antisymmetric_frequencies(4, 4, 0)
        with pytest.raises(ValueError):
            solve_linearized_exact(np.zeros(4, dtype=complex), freq)


class TestLinearizedCompressive:
    def test_square_case_matches_exact_solve(self):
        n = 41
        rng = np.random.default_rng(7)
        freq = antisym(n, 7)
        x = mixed_parity_signal(rng, n)
        delta = rng.uniform(-0.5, 0.5, n)
        y = forward_linearized(x, delta, freq)
        sol = solve_linearized_exact(y, freq)
        x_hat, d_hat = solve_linearized_compressive(y, freq, n,
                                                    SolverConfig(lam=100.0))
        assert np.abs(x_hat - sol.x_hat).max() < 1e-8
        assert np.abs(d_hat - sol.delta_hat).max() < 1e-6

    def test_compressive_recovery_sparse(self):
        n, m, s = 100, 80, 20
        basis = SparsityBasis("canonical", n)
        rng = np.random.default_rng(8)
        x, _ = gen_sparse_signal(n, s, basis, 8)
        freq = gen_antisymmetric_frequencies(m, n, 8, r=0.5)
        delta = rng.uniform(-0.5, 0.5, m)
        f0 = build_matrix(freq, n).entries
        fp = derivative_matrix(freq.u, n).entries
        y = f0 @ x - 1j * delta * (fp @ x)
        x_hat, _ = solve_linearized_compressive(y, freq, n,
                                                SolverConfig(lam=100.0))
        assert np.linalg.norm(x_hat - x) / np.linalg.norm(x) < 1e-6

    def test_delta_zero_data_matches_bp(self):
        n, m = 64, 48
        basis = SparsityBasis("canonical", n)
        x, _ = gen_sparse_signal(n, 6, basis, 9)
        freq = gen_antisymmetric_frequencies(m, n, 9)
        f0 = build_matrix(freq, n).entries
        y = f0 @ x
        x_hat, d_hat = solve_linearized_compressive(y, freq, n,
                                                    SolverConfig(lam=50.0))
        bp = solve_bp(f0, y, SolverConfig(lam=50.0))
        assert np.abs(d_hat).max() == 0.0
        assert np.linalg.norm(x_hat - bp.x_hat) < 1e-5

    def test_m_above_n_rejected(self):
        freq = gen_antisymmetric_frequencies(8, 8, 0)
        with pytest.raises(ValueError):
            solve_linearized_compressive(np.zeros(8, dtype=complex), freq, 7,
                                         SolverConfig(lam=1.0))
