import numpy as np
import pytest

from fouriercal.operators import (FrequencySet, adjoint, adjoint_2d,
                                  build_matrix, build_matrix_2d,
                                  centered_indices, derivative_matrix,
                                  even_odd_parts, forward, forward_2d,
                                  modulation_vector)

from oracles import forward2d_bruteforce, forward_bruteforce


def freq1d(u, delta=None, r=0.0):
    u = np.asarray(u, dtype=float)
    d = np.zeros_like(u) if delta is None else np.asarray(delta, dtype=float)
    return FrequencySet(u, d, r=r if r else float(np.abs(d).max(initial=0.0)))


class TestCenteredIndices:
    def test_odd(self):
        assert centered_indices(5).tolist() == [-2, -1, 0, 1, 2]

    def test_even(self):
        assert centered_indices(8).tolist() == [-4, -3, -2, -1, 0, 1, 2, 3]


class TestEvenOdd:
    @pytest.mark.parametrize("n", [5, 8, 101, 128])
    def test_decomposition_exact(self, n):
        rng = np.random.default_rng(n)
        x = rng.standard_normal(n)
        e, o = even_odd_parts(x)
        assert np.abs(e + o - x).max() < 1e-12
        l = centered_indices(n)
        for i, li in enumerate(l):
            if -li in l:
                j = int(np.where(l == -li)[0][0])
                assert e[i] == pytest.approx(e[j], abs=1e-12)
                assert o[i] == pytest.approx(-o[j], abs=1e-12)


class TestBuildMatrix:
    def test_zero_frequency_sums(self):
        # M=1, u=0, delta=0: all phases are 1, scaling 1/sqrt(1)
        f = freq1d([0.0])
        y = forward(np.array([1.0, 1.0, 1.0]), f)
        assert y[0] == pytest.approx(3.0, abs=1e-12)

    def test_center_impulse(self):
        n = 9
        rng = np.random.default_rng(1)
        f = freq1d(rng.uniform(-4, 4, 5), rng.uniform(-0.3, 0.3, 5))
        x = np.zeros(n)
        x[n // 2] = 1.0  # spatial index l = 0
        y = forward(x, f)
        assert np.abs(y - 1 / np.sqrt(5)).max() < 1e-12

    def test_against_bruteforce_sum(self):
        n = 8
        rng = np.random.default_rng(2)
        x = rng.integers(-5, 5, n).astype(float)
        f = freq1d([1.5], [0.25], r=0.25)
        y = forward(x, f)
        expected = forward_bruteforce(x, [1.75])
        assert np.abs(y - expected).max() < 1e-12

    def test_unit_modulus_entries(self):
        rng = np.random.default_rng(3)
        f = freq1d(rng.uniform(-8, 8, 6), rng.uniform(-0.5, 0.5, 6))
        mat = build_matrix(f, 16)
        assert np.abs(np.abs(mat.entries) - 1 / np.sqrt(6)).max() < 1e-15

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            FrequencySet(np.array([np.nan]), np.array([0.0]))

    def test_rejects_delta_above_bound(self):
        with pytest.raises(ValueError):
            FrequencySet(np.array([1.0]), np.array([0.5]), r=0.1)


class TestForwardAdjoint:
    def test_zero_signal(self):
        f = freq1d([1.0, 2.0])
        assert np.abs(forward(np.zeros(7), f)).max() == 0.0

    def test_linearity(self):
        n = 16
        rng = np.random.default_rng(4)
        f = freq1d(rng.uniform(-8, 8, 5), rng.uniform(-0.4, 0.4, 5))
        x1, x2 = rng.standard_normal((2, n))
        a, b = 1.7, -0.3
        lhs = forward(a * x1 + b * x2, f)
        rhs = a * forward(x1, f) + b * forward(x2, f)
        assert np.abs(lhs - rhs).max() < 1e-12

    def test_matches_dense_matrix(self):
        n, m = 16, 8
        rng = np.random.default_rng(5)
        f = freq1d(rng.choice(np.arange(-8, 8), m, replace=False).astype(float))
        x = rng.standard_normal(n)
        dense = build_matrix(f, n).entries @ x
        assert np.abs(forward(x, f) - dense).max() < 1e-12

    def test_adjoint_zero(self):
        f = freq1d([1.0, 2.0])
        assert np.abs(adjoint(np.zeros(2), f, 5)).max() == 0.0

    def test_inner_product_identity(self):
        n, m = 32, 16
        rng = np.random.default_rng(6)
        f = freq1d(rng.uniform(-16, 16, m), rng.uniform(-0.5, 0.5, m))
        for _ in range(20):
            x = rng.standard_normal(n)
            y = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            lhs = np.vdot(y, forward(x, f))
            rhs = np.vdot(adjoint(y, f, n), x.astype(complex))
            assert abs(lhs - rhs) < 1e-10

    def test_full_grid_inverse(self):
        # integer frequencies covering all bins once: orthonormal rows
        n = 12
        f = freq1d(centered_indices(n).astype(float))
        rng = np.random.default_rng(7)
        x = rng.standard_normal(n)
        back = adjoint(forward(x, f), f, n)
        assert np.abs(back - x).max() < 1e-10
        # cross-check scaling against the dense pseudo-inverse
        mat = build_matrix(f, n).entries
        pinv_back = np.linalg.pinv(mat) @ (mat @ x)
        assert np.abs(back - pinv_back).max() < 1e-10

    def test_dimension_mismatch(self):
        f = freq1d([1.0, 2.0])
        with pytest.raises(ValueError):
            adjoint(np.zeros(3), f, 5)


class TestModulationIdentity:
    def test_shared_shift_equals_modulation(self):
        n = 21
        rng = np.random.default_rng(8)
        u = rng.uniform(-10, 10, 9)
        shift = 0.37
        x = rng.standard_normal(n)
        pert = FrequencySet(u, np.full(9, shift), r=0.5)
        base = FrequencySet(u, np.zeros(9), r=0.5)
        lhs = forward(x, pert)
        v = modulation_vector(shift, n)
        rhs = build_matrix(base, n).entries @ (x * v)
        assert np.abs(lhs - rhs).max() < 1e-10

    def test_modulated_signals_share_magnitudes(self):
        # every modulated copy x * v_beta keeps |x| entrywise
        n = 17
        rng = np.random.default_rng(14)
        x = rng.standard_normal(n)
        for beta in (-0.4, 0.05, 0.31):
            xb = x * modulation_vector(beta, n)
            assert np.abs(np.abs(xb) - np.abs(x)).max() < 1e-12


class TestDerivativeMatrix:
    def test_center_column_zero(self):
        mat = derivative_matrix(np.array([1.0, 2.5]), 9)
        assert np.abs(mat.entries[:, 9 // 2]).max() == 0.0

    def test_diagonal_n5(self):
        mat = derivative_matrix(np.array([0.0]), 5)
        # F'(0, l) = (1/sqrt M) * X_ll at u=0, X = 2*pi*l/5 over centered l
        expected = 2 * np.pi / 5 * np.array([-2, -1, 0, 1, 2])
        assert np.abs(mat.entries[0].real - expected).max() < 1e-12

    def test_finite_difference(self):
        n, m = 11, 4
        rng = np.random.default_rng(9)
        u = rng.uniform(-5, 5, m)
        fp = derivative_matrix(u, n).entries
        f0 = build_matrix(FrequencySet(u, np.zeros(m)), n).entries
        errs = []
        for eps in (1e-3, 1e-4):
            f_eps = build_matrix(FrequencySet(u, np.full(m, eps), r=eps), n).entries
            fd = (f_eps - f0) / eps
            errs.append(np.abs(fd - (-1j) * fp).max())
        assert errs[0] < 5e-3
        # first-order accuracy: error shrinks ~10x with eps
        assert errs[1] < 0.2 * errs[0]


class TestForward2D:
    def make_freq2d(self, pts, r=0.0):
        u = np.asarray(pts, dtype=float)
        return FrequencySet(u, np.zeros_like(u), r=r)

    def test_constant_image_dc(self):
        img = np.ones((4, 4))
        f = self.make_freq2d([[0.0, 0.0]])
        y = forward_2d(img, f)
        assert y[0] == pytest.approx(16.0, abs=1e-12)

    def test_separable_image(self):
        rng = np.random.default_rng(10)
        a = rng.standard_normal(8)
        b = rng.standard_normal(8)
        img = np.outer(a, b)
        f2 = self.make_freq2d([[1.25, 2.5]])
        y = forward_2d(img, f2)
        fa = forward(a, freq1d([1.25]))
        fb = forward(b, freq1d([2.5]))
        # each 1D forward carries 1/sqrt(1); product keeps it
        assert y[0] == pytest.approx(fa[0] * fb[0], abs=1e-12)

    def test_against_double_loop(self):
        rng = np.random.default_rng(11)
        img = rng.standard_normal((8, 8))
        pts = rng.uniform(-4, 4, (5, 2))
        f2 = self.make_freq2d(pts)
        y = forward_2d(img, f2)
        expected = forward2d_bruteforce(img, pts)
        assert np.abs(y - expected).max() < 1e-12

    def test_matches_dense_2d_matrix(self):
        rng = np.random.default_rng(12)
        img = rng.standard_normal((4, 8))
        pts = rng.uniform(-2, 2, (6, 2))
        f2 = self.make_freq2d(pts)
        dense = build_matrix_2d(f2, 4, 8).entries @ img.reshape(-1)
        assert np.abs(forward_2d(img, f2) - dense).max() < 1e-12

    def test_size_cap(self):
        f2 = self.make_freq2d([[0.0, 0.0]])
        with pytest.raises(ValueError):
            forward_2d(np.zeros((80, 80)), f2)

    def test_adjoint_2d_identity(self):
        rng = np.random.default_rng(13)
        pts = rng.uniform(-4, 4, (7, 2))
        f2 = self.make_freq2d(pts)
        img = rng.standard_normal((8, 4))
        y = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        lhs = np.vdot(y, forward_2d(img, f2))
        rhs = np.vdot(adjoint_2d(y, f2, 8, 4), img.astype(complex))
        assert abs(lhs - rhs) < 1e-10
