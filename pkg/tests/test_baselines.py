import numpy as np
import pytest

from fouriercal.altmin import AltMinConfig
from fouriercal.baselines import (baseline1, baseline2, taylor_alternation,
                                  taylor_delta_update)
from fouriercal.operators import (FrequencySet, build_matrix,
                                  derivative_matrix, forward)
from fouriercal.solvers import SolverConfig


def make_instance(n=32, m=24, s=3, r=0.5, seed=0, delta=None, noise=0.0):
    rng = np.random.default_rng(seed)
    u = np.sort(rng.choice(np.arange(-(n // 2), n // 2 + 1), m,
                           replace=False)).astype(float)
    freq = FrequencySet(u, np.zeros(m), r=r)
    x = np.zeros(n)
    x[rng.choice(n, s, replace=False)] = rng.standard_normal(s)
    if delta is None:
        delta = rng.uniform(-r, r, m)
    y = forward(x, freq.with_delta(delta))
    if noise > 0:
        sigma = noise * np.abs(y).mean()
        y = y + sigma * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
    return freq, x, delta, y


class TestBaseline1:
    def test_exact_when_delta_zero(self):
        freq, x, _, y = make_instance(delta=np.zeros(24), seed=1)
        rep = baseline1(y, freq, 32, SolverConfig(lam=7.0))
        assert np.linalg.norm(rep.x_hat - x) / np.linalg.norm(x) < 1e-5

    def test_zero_measurements(self):
        freq, *_ = make_instance(seed=2)
        rep = baseline1(np.zeros(24, dtype=complex), freq, 32,
                        SolverConfig(lam=7.0))
        assert np.abs(rep.x_hat).max() == 0.0

    def test_degrades_under_perturbation(self):
        # the point of the whole exercise: ignoring delta hurts a lot
        freq, x, delta, y = make_instance(r=1.0, seed=3)
        rep = baseline1(y, freq, 32, SolverConfig(lam=7.0))
        err = np.linalg.norm(rep.x_hat - x) / np.linalg.norm(x)
        assert err > 0.3


class TestTaylorDeltaUpdate:
    def test_exact_on_linear_model_data(self):
        n, m = 16, 16
        rng = np.random.default_rng(4)
        u = rng.uniform(-8, 8, m)
        freq = FrequencySet(u, np.zeros(m), r=0.5)
        f0 = build_matrix(freq, n).entries
        fp = derivative_matrix(u, n).entries
        x = rng.standard_normal(n)
        delta = rng.uniform(-0.4, 0.4, m)
        y = f0 @ x - 1j * delta * (fp @ x)
        found = taylor_delta_update(y, f0 @ x, fp @ x, clamp_r=0.5)
        assert np.abs(found - delta).max() < 1e-10

    def test_zero_signal_degenerate_rows(self):
        n, m = 8, 5
        rng = np.random.default_rng(5)
        u = rng.uniform(-4, 4, m)
        f0 = build_matrix(FrequencySet(u, np.zeros(m)), n).entries
        fp = derivative_matrix(u, n).entries
        y = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        x = np.zeros(n)
        found = taylor_delta_update(y, f0 @ x, fp @ x, clamp_r=1.0)
        assert np.abs(found).max() == 0.0

    def test_clamping(self):
        n, m = 8, 5
        rng = np.random.default_rng(6)
        u = rng.uniform(-4, 4, m)
        freq = FrequencySet(u, np.zeros(m), r=3.0)
        f0 = build_matrix(freq, n).entries
        fp = derivative_matrix(u, n).entries
        x = rng.standard_normal(n)
        delta = rng.uniform(2.0, 3.0, m)      # beyond the clamp below
        y = f0 @ x - 1j * delta * (fp @ x)
        found = taylor_delta_update(y, f0 @ x, fp @ x, clamp_r=0.25)
        assert np.abs(found).max() <= 0.25


class TestBaseline2:
    def test_delta_zero_fixed_point(self):
        freq, x, _, y = make_instance(delta=np.zeros(24), seed=7)
        rep = baseline2(y, freq, 32, 0.5, SolverConfig(lam=7.0),
                        AltMinConfig(num_starts=3, seed=1))
        err = np.linalg.norm(rep.x_hat - x) / np.linalg.norm(x)
        assert err < 0.05
        assert np.abs(rep.delta_hat).max() <= 0.5

    def test_monotone_surrogate_trace(self):
        freq, x, delta, y = make_instance(seed=8, noise=0.05)
        rep = baseline2(y, freq, 32, 0.5, SolverConfig(lam=7.0),
                        AltMinConfig(num_starts=2, seed=2))
        assert np.all(np.diff(rep.objective_trace) <= 1e-9)

    def test_delta_always_clamped(self):
        freq, x, delta, y = make_instance(r=1.0, seed=9, noise=0.05)
        rep = baseline2(y, freq, 32, 1.0, SolverConfig(lam=7.0),
                        AltMinConfig(num_starts=2, seed=3))
        assert np.abs(rep.delta_hat).max() <= 1.0 + 1e-15

    def test_rejects_2d(self):
        u = np.zeros((4, 2))
        freq = FrequencySet(u, np.zeros((4, 2)), r=0.0)
        with pytest.raises(ValueError):
            baseline2(np.zeros(4, dtype=complex), freq, (4, 4), 0.1,
                      SolverConfig(lam=1.0), AltMinConfig())


class TestTaylorAlternation:
    def test_trace_bounded_by_zero_objective(self):
        freq, x, delta, y = make_instance(seed=10)
        f0 = build_matrix(freq, 32).entries
        fp = derivative_matrix(freq.u, 32).entries
        cfg = SolverConfig(lam=7.0)
        _, _, trace, _ = taylor_alternation(y, f0, fp, 0.5, cfg, 1e-4, 30,
                                            np.zeros(24))
        assert trace[0] <= cfg.lam * np.linalg.norm(y) + 1e-9
        assert np.all(np.diff(trace) <= 1e-9)
