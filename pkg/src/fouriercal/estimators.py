"""scikit-learn style estimators wrapping the recovery algorithms.

``fit(u, y)`` consumes the base frequencies (one row per measurement) and
the complex measurement vector, and exposes the recovered signal and
perturbations as fitted attributes, so recoveries compose with sklearn
tooling (``clone``, ``get_params`` grids, pipelines over instances).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .altmin import AltMinConfig, multistart
from .bases import SparsityBasis
from .baselines import baseline1
from .operators import FrequencySet, forward, forward_2d
from .perturbations import PerturbationModel, independent_model
from .solvers import SolverConfig, default_lambda


def check_measurements(y) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1 or y.shape[0] < 1:
        raise ValueError("y must be a nonempty 1D measurement vector")
    if not np.all(np.isfinite(y.real)) or not np.all(np.isfinite(y.imag)):
        raise ValueError("measurements must be finite")
    return y.astype(complex)


def check_frequencies(u, m_expected: int | None = None) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim == 2 and u.shape[1] != 2:
        raise ValueError("2D frequencies must have shape (M, 2)")
    if u.ndim not in (1, 2):
        raise ValueError("frequencies must have shape (M,) or (M, 2)")
    if not np.all(np.isfinite(u)):
        raise ValueError("frequencies must be finite")
    if m_expected is not None and u.shape[0] != m_expected:
        raise ValueError("frequency count does not match measurement count")
    return u


class PerturbedFourierRecovery(BaseEstimator):
    """Joint sparse-signal / frequency-perturbation estimator.

    Parameters
    ----------
    n : signal length (or image side for 2D problems).
    r : perturbation bound.
    model : optional :class:`PerturbationModel`; defaults to one independent
        perturbation per measurement.
    lam : data-fit weight, or "auto" for 0.1*sqrt(M).
    basis : "canonical", "haar1d" or "haar2d".
    """

    def __init__(self, n: int, r: float = 1.0,
                 model: PerturbationModel | None = None,
                 lam: float | str = "auto", basis: str = "canonical",
                 num_starts: int = 10, grid_step: float | None = None,
                 chi: float = 1e-4, max_outer_iters: int = 50,
                 refine: bool = False, seed: int = 0):
        self.n = n
        self.r = r
        self.model = model
        self.lam = lam
        self.basis = basis
        self.num_starts = num_starts
        self.grid_step = grid_step
        self.chi = chi
        self.max_outer_iters = max_outer_iters
        self.refine = refine
        self.seed = seed

    def _shape(self):
        return (self.n, self.n) if self.basis == "haar2d" else self.n

    def fit(self, u, y):
        y = check_measurements(y)
        u = check_frequencies(u, m_expected=y.shape[0])
        model = self.model if self.model is not None \
            else independent_model(u.shape[0], self.r)
        from .perturbations import delta_bound

        freq = FrequencySet(u, np.zeros_like(u), r=delta_bound(model))
        lam = default_lambda(u.shape[0]) if self.lam == "auto" else float(self.lam)
        solver_cfg = SolverConfig(lam=lam)
        altmin_cfg = AltMinConfig(grid_step=self.grid_step, chi=self.chi,
                                  max_outer_iters=self.max_outer_iters,
                                  num_starts=self.num_starts,
                                  seed=self.seed, refine=self.refine)
        basis = SparsityBasis(self.basis, self._shape())
        res = multistart(y, freq, model, self._shape(), solver_cfg,
                         altmin_cfg, basis=basis)
        self.x_ = res.x_hat
        self.delta_ = res.delta_hat
        self.beta_ = res.beta_hat
        self.objective_trace_ = res.objective_trace
        self.converged_ = res.converged
        self.freq_ = freq.with_delta(res.delta_hat)
        return self

    def predict(self, u=None):
        """Measurements reproduced by the fitted model; at new frequencies
        the perturbation estimate does not transfer and delta = 0 is used."""
        if not hasattr(self, "x_"):
            raise RuntimeError("estimator is not fitted")
        if u is None:
            freq = self.freq_
        else:
            u = check_frequencies(u)
            freq = FrequencySet(u, np.zeros_like(u), r=0.0)
        if freq.is_2d:
            return forward_2d(self.x_, freq)
        return forward(self.x_, freq)

    def score(self, u, y):
        """Negative relative residual of the fitted model on (u, y)."""
        y = check_measurements(y)
        y_hat = self.predict(None if np.array_equal(u, self.freq_.u) else u)
        return -float(np.linalg.norm(y - y_hat) / np.linalg.norm(y))


class BasisPursuitRecovery(BaseEstimator):
    """Perturbation-ignoring sparse recovery (the naive baseline)."""

    def __init__(self, n: int, lam: float | str = "auto",
                 basis: str = "canonical"):
        self.n = n
        self.lam = lam
        self.basis = basis

    def fit(self, u, y):
        y = check_measurements(y)
        u = check_frequencies(u, m_expected=y.shape[0])
        freq = FrequencySet(u, np.zeros_like(u), r=0.0)
        lam = default_lambda(u.shape[0]) if self.lam == "auto" else float(self.lam)
        shape = (self.n, self.n) if self.basis == "haar2d" else self.n
        rep = baseline1(y, freq, shape, SolverConfig(lam=lam),
                        basis=SparsityBasis(self.basis, shape))
        self.x_ = rep.x_hat
        self.freq_ = freq
        self.converged_ = rep.converged
        return self

    def predict(self, u=None):
        if not hasattr(self, "x_"):
            raise RuntimeError("estimator is not fitted")
        freq = self.freq_ if u is None else FrequencySet(
            check_frequencies(u), np.zeros_like(check_frequencies(u)), r=0.0)
        if freq.is_2d:
            return forward_2d(self.x_, freq)
        return forward(self.x_, freq)
