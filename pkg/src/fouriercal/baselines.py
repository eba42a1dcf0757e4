"""Comparison algorithms: perturbation-ignoring recovery and a first-order
Taylor alternation.

Baseline 1 pretends the perturbations are zero and runs the sparse solver
with the nominal matrix.  Baseline 2 linearizes the perturbed matrix as
``F - i*diag(delta)*F'`` (the first-order expansion under the
negative-exponent phase convention) and alternates the sparse solver with a
per-row closed-form least-squares update of ``delta``.  The Taylor
truncation error scales with ||x||, which is why this baseline degrades at
realistic perturbation sizes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bases import SparsityBasis
from .operators import FrequencySet, build_matrix, derivative_matrix
from .solvers import SolverConfig, solve_sqlasso
from .altmin import AltMinConfig

DEGENERATE_ROW_TOL = 1e-14


@dataclass
class BaselineReport:
    x_hat: np.ndarray
    delta_hat: np.ndarray | None
    objective_trace: np.ndarray
    rrmse: float = field(default=np.nan)
    converged: bool = True
    coeffs: np.ndarray | None = None

    @property
    def objective(self) -> float:
        return float(self.objective_trace[-1])


def baseline1(y: np.ndarray, freq: FrequencySet, shape,
              solver_cfg: SolverConfig,
              basis: SparsityBasis | None = None) -> BaselineReport:
    """Basis pursuit with the unperturbed matrix (delta assumed zero)."""
    from .altmin import _sensing_matrix

    zero = freq.with_delta(np.zeros_like(freq.delta))
    shape_t = (shape,) if np.isscalar(shape) else tuple(shape)
    if basis is None:
        basis = SparsityBasis("canonical", shape_t if len(shape_t) > 1 else shape_t[0])
    a = _sensing_matrix(zero, shape_t if len(shape_t) > 1 else shape_t[0], basis)
    report = solve_sqlasso(a, y, solver_cfg)
    x_flat = basis.synthesize(report.x_hat)
    x = x_flat.reshape(shape_t) if len(shape_t) > 1 else x_flat
    return BaselineReport(x, None, np.array([report.objective]),
                          converged=report.converged, coeffs=report.x_hat)


def taylor_delta_update(y: np.ndarray, f0x: np.ndarray, fpx: np.ndarray,
                        clamp_r: float | None) -> np.ndarray:
    """Per-row least-squares delta under the linear model.

    Minimizes |y_i - (F x)_i + i*delta*(F' x)_i|^2 in the scalar delta_i;
    rows with |(F' x)_i|^2 below a tiny floor get delta_i = 0.
    """
    rho = y - f0x
    w2 = np.abs(fpx) ** 2
    delta = np.zeros(len(y))
    ok = w2 >= DEGENERATE_ROW_TOL
    delta[ok] = -np.imag(rho[ok] * np.conj(fpx[ok])) / w2[ok]
    if clamp_r is not None:
        np.clip(delta, -clamp_r, clamp_r, out=delta)
    return delta


def taylor_alternation(y: np.ndarray, f0: np.ndarray, fprime: np.ndarray,
                       clamp_r: float | None, solver_cfg: SolverConfig,
                       chi: float, max_outer: int, delta0: np.ndarray,
                       basis_matrix: np.ndarray | None = None
                       ) -> tuple[np.ndarray, np.ndarray, np.ndarray, bool]:
    """Alternate the sparse solver and the closed-form delta update on the
    surrogate J = ||coeffs||_1 + lam*||y - (F - i diag(delta) F') x||_2.

    Returns (coeffs, delta, objective_trace, converged).  Both half-steps
    can only decrease the surrogate, so the trace is non-increasing.
    """
    delta = np.asarray(delta0, dtype=float).copy()
    n_cols = f0.shape[1] if basis_matrix is None else basis_matrix.shape[1]
    coeffs = np.zeros(n_cols)
    x_signal = np.zeros(f0.shape[1])
    trace: list[float] = []
    converged = False

    def model_matrix(d):
        a = f0 - 1j * d[:, None] * fprime
        return a if basis_matrix is None else a @ basis_matrix

    for _ in range(max_outer):
        delta_prev, x_prev = delta, x_signal
        a = model_matrix(delta)
        report = solve_sqlasso(a, y, solver_cfg, x0=coeffs)
        coeffs = report.x_hat
        x_signal = coeffs if basis_matrix is None else basis_matrix @ coeffs
        trace.append(report.objective)

        delta = taylor_delta_update(y, f0 @ x_signal, fprime @ x_signal, clamp_r)
        res = np.linalg.norm(y - model_matrix(delta) @ coeffs)
        trace.append(float(np.abs(coeffs).sum()) + solver_cfg.lam * res)

        if (np.linalg.norm(delta - delta_prev) < chi
                and np.linalg.norm(x_signal - x_prev) < chi):
            converged = True
            break
    return coeffs, delta, np.asarray(trace), converged


def baseline2(y: np.ndarray, freq: FrequencySet, shape, r: float,
              solver_cfg: SolverConfig, altmin_cfg: AltMinConfig,
              basis: SparsityBasis | None = None) -> BaselineReport:
    """Taylor-linearized alternating recovery with the same multi-start
    protocol as the main algorithm; delta estimates are clamped to [-r, r].

    The first start uses the nominal calibration delta = 0 (the natural
    Taylor expansion point); the rest draw from Uniform[-r, r].
    """
    if not np.isscalar(shape):
        raise ValueError("baseline2 is defined for 1D signals")
    n = int(shape)
    y = np.asarray(y, dtype=complex)
    if basis is None:
        basis = SparsityBasis("canonical", n)
    basis_matrix = None if basis.kind == "canonical" else basis.matrix()

    f0 = build_matrix(freq.with_delta(np.zeros_like(freq.delta)), n).entries
    fprime = derivative_matrix(freq.u, n).entries

    best = None
    for start in range(altmin_cfg.num_starts):
        rng = np.random.default_rng(altmin_cfg.seed + start)
        delta0 = np.zeros(freq.M) if start == 0 else rng.uniform(-r, r, freq.M)
        coeffs, delta, trace, conv = taylor_alternation(
            y, f0, fprime, r, solver_cfg, altmin_cfg.chi,
            altmin_cfg.max_outer_iters, delta0, basis_matrix)
        if best is None or trace[-1] < best[2][-1]:
            best = (coeffs, delta, trace, conv)
    coeffs, delta, trace, conv = best
    x = coeffs if basis_matrix is None else basis_matrix @ coeffs
    return BaselineReport(x, delta, trace, converged=conv, coeffs=coeffs)
