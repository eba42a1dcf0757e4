"""Alternating recovery of a sparse signal and frequency perturbations.

Each outer iteration alternates two half-steps until neither the signal nor
the perturbation estimate moves by more than ``chi``:

  1. signal step  -- square-root LASSO with the perturbation estimate fixed;
  2. search step  -- exhaustive grid search over each perturbation parameter
                     (independently per parameter group) with the signal fixed.

Because the measurements are row-separable in the perturbations, the search
decomposes into independent per-group 1D problems.  The whole procedure is
wrapped in a multi-start loop over random initializations, keeping the
lowest-objective run.

The recorded objective trace J = ||coeffs||_1 + lam * ||y - A(delta) x||_2
is non-increasing across half-steps by construction: the solver is
warm-started from the previous signal, and the search candidates always
include the previous parameter value.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .bases import SparsityBasis
from .operators import FrequencySet, build_matrix, build_matrix_2d, centered_indices
from .perturbations import PerturbationModel, expand
from .solvers import SolverConfig, solve_sqlasso

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AltMinConfig:
    grid_step: float | None = None   # None -> 2r/200 (201 points)
    chi: float = 1e-4
    max_outer_iters: int = 50
    num_starts: int = 10
    seed: int = 0
    refine: bool = False             # optional fine pass at 1/10 step

    def __post_init__(self):
        if self.chi <= 0:
            raise ValueError("chi must be positive")
        if self.num_starts < 1:
            raise ValueError("num_starts must be >= 1")


@dataclass
class RecoveryResult:
    x_hat: np.ndarray
    delta_hat: np.ndarray
    beta_hat: np.ndarray
    objective_trace: np.ndarray
    converged: bool
    start_index: int = 0
    coeffs: np.ndarray | None = None
    tie_events: int = 0
    n_outer: int = 0

    @property
    def objective(self) -> float:
        return float(self.objective_trace[-1])


def perturbation_grid(r: float, grid_step: float | None) -> np.ndarray:
    """Symmetric candidate grid over [-r, r] containing both endpoints and 0."""
    if r < 0:
        raise ValueError("r must be >= 0")
    if r == 0:
        return np.zeros(1)
    if grid_step is None:
        n_pts = 201
    else:
        if not 0 < grid_step <= 2 * r:
            raise ValueError("grid_step must lie in (0, 2r]")
        n_pts = int(round(2 * r / grid_step)) + 1
        if n_pts % 2 == 0:
            n_pts += 1  # keep 0 on the grid
    return np.linspace(-r, r, n_pts)


def _snap_to_grid(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    idx = np.abs(values[:, None] - grid[None, :]).argmin(axis=1)
    return grid[idx]


def _pick(costs: np.ndarray, cands: np.ndarray) -> tuple[float, int]:
    """Exact argmin with ties broken toward smallest |d|, then negative d."""
    m = costs.min()
    ties = np.flatnonzero(costs == m)
    if len(ties) == 1:
        return float(cands[ties[0]]), 0
    order = np.lexsort((cands[ties] > 0, np.abs(cands[ties])))
    return float(cands[ties[order[0]]]), 1


class _SearchKernel1D:
    """Residual evaluation for scalar frequency shifts (1D links).

    pred(d, i) = sum_l F0[i, l] * exp(-2i*pi*d*l/N) * x[l], so the candidate
    modulations factor out of the base matrix and one matmul evaluates the
    whole grid.
    """

    def __init__(self, freq: FrequencySet, n: int):
        l = centered_indices(n)
        self.l = l
        self.n = n
        self.scale = 1.0 / np.sqrt(freq.M)
        self.base = np.exp(-2j * np.pi * np.outer(freq.u, l) / n) * self.scale

    def predictions(self, x_signal: np.ndarray, cands: np.ndarray) -> np.ndarray:
        mod = np.exp(-2j * np.pi * np.outer(cands, self.l) / self.n)
        return (mod * x_signal[None, :]) @ self.base.T  # (G, M)

    def row_costs(self, y: np.ndarray, x_signal: np.ndarray,
                  cands: np.ndarray) -> np.ndarray:
        pred = self.predictions(x_signal, cands)
        return np.abs(y[None, :] - pred) ** 2  # (G, M)


class _SearchKernel2D:
    """Residual evaluation for per-spoke 2D links (tomo_angle / mri_radial_delay).

    Uses the separability of the 2D exponential: for each candidate and row,
    pred = e1 @ X @ e2 with two length-N phase vectors.
    """

    def __init__(self, freq: FrequencySet, model: PerturbationModel,
                 shape: tuple[int, int]):
        self.freq = freq
        self.model = model
        self.n1, self.n2 = shape
        self.l1 = centered_indices(self.n1)
        self.l2 = centered_indices(self.n2)
        self.scale = 1.0 / np.sqrt(freq.M)

    def _group_frequencies(self, k: int, cands: np.ndarray) -> np.ndarray:
        """Perturbed frequencies for group k at every candidate: (G, nk, 2)."""
        idx = self.model.groups[k]
        u = self.freq.u[idx]
        alpha = self.model.alphas[k]
        if self.model.kind == "tomo_angle":
            rho = self.model.rho[idx]
            t = alpha + cands[:, None]
            f1 = rho[None, :] * np.cos(t)
            f2 = rho[None, :] * np.sin(t)
            return np.stack([f1, f2], axis=-1)
        shift = self.model.K * cands
        f1 = u[None, :, 0] + shift[:, None] * np.cos(alpha)
        f2 = u[None, :, 1] + shift[:, None] * np.sin(alpha)
        return np.stack([f1, f2], axis=-1)

    def group_costs(self, y: np.ndarray, x_img: np.ndarray, k: int,
                    cands: np.ndarray) -> np.ndarray:
        idx = self.model.groups[k]
        f = self._group_frequencies(k, cands)
        e1 = np.exp(-2j * np.pi * f[..., 0][..., None] * self.l1 / self.n1)
        e2 = np.exp(-2j * np.pi * f[..., 1][..., None] * self.l2 / self.n2)
        t = np.einsum("gil,lm->gim", e1, x_img.astype(complex))
        pred = (t * e2).sum(axis=-1) * self.scale  # (G, nk)
        return (np.abs(y[idx][None, :] - pred) ** 2).sum(axis=1)  # (G,)


def _refined_candidates(center: float, step: float, r: float) -> np.ndarray:
    lo = max(-r, center - step)
    hi = min(r, center + step)
    fine = np.linspace(lo, hi, 21)
    return np.unique(np.concatenate([fine, [center]]))


def beta_search_grouped(y: np.ndarray, freq: FrequencySet, x_signal: np.ndarray,
                        model: PerturbationModel, grid_step: float | None = None,
                        refine: bool = False,
                        prev_beta: np.ndarray | None = None) -> tuple[np.ndarray, int]:
    """Grid argmin of each group's residual ||y_Lk - F_Lk(h(d)) x||_2.

    Returns ``(beta, tie_events)``.  Candidates are the symmetric grid over
    [-r, r] plus, when given, the previous value of each parameter (which
    keeps the alternation monotone even for off-grid previous values).
    Ties break toward the smallest |d| and then toward the negative value.
    """
    grid = perturbation_grid(model.r, grid_step)
    beta = np.empty(model.P)
    ties = 0
    step = grid[1] - grid[0] if len(grid) > 1 else 0.0

    if model.is_2d:
        kernel = _SearchKernel2D(freq, model, x_signal.shape)
        for k in range(model.P):
            cands = grid
            if prev_beta is not None and not np.any(grid == prev_beta[k]):
                cands = np.unique(np.append(grid, prev_beta[k]))
            costs = kernel.group_costs(y, x_signal, k, cands)
            beta[k], t = _pick(costs, cands)
            ties += t
            if refine and step > 0:
                cands = _refined_candidates(beta[k], step, model.r)
                costs = kernel.group_costs(y, x_signal, k, cands)
                beta[k], t = _pick(costs, cands)
        return beta, ties

    kernel = _SearchKernel1D(freq, x_signal.shape[0])
    row_costs = kernel.row_costs(y, x_signal, grid)  # (G, M)
    prev_costs = None
    if prev_beta is not None:
        delta_prev = expand(model, prev_beta)
        pred_prev = (kernel.base
                     * np.exp(-2j * np.pi * np.outer(delta_prev, kernel.l) / kernel.n)
                     ) @ x_signal
        prev_costs = np.abs(y - pred_prev) ** 2
    for k, idx in enumerate(model.groups):
        costs = row_costs[:, idx].sum(axis=1)
        cands = grid
        if prev_costs is not None and not np.any(grid == prev_beta[k]):
            cands = np.append(grid, prev_beta[k])
            costs = np.append(costs, prev_costs[idx].sum())
        beta[k], t = _pick(costs, cands)
        ties += t
        if refine and step > 0:
            cands = _refined_candidates(beta[k], step, model.r)
            pred = kernel.predictions(x_signal, cands)[:, idx]
            costs = (np.abs(y[idx][None, :] - pred) ** 2).sum(axis=1)
            beta[k], t = _pick(costs, cands)
    return beta, ties


def delta_search_independent(y: np.ndarray, freq: FrequencySet,
                             x_signal: np.ndarray, r: float,
                             grid_step: float | None = None,
                             refine: bool = False,
                             prev_delta: np.ndarray | None = None) -> np.ndarray:
    """Per-measurement grid argmin of the single-row residual.

    Structurally identical to :func:`beta_search_grouped` with singleton
    groups and the identity link; exposed separately because it is the
    plain (ungrouped) variant of the search step.
    """
    from .perturbations import independent_model

    model = independent_model(freq.M, r)
    beta, _ = beta_search_grouped(y, freq, x_signal, model, grid_step,
                                  refine=refine, prev_beta=prev_delta)
    return beta


def _sensing_matrix(freq: FrequencySet, shape,
                    basis: SparsityBasis | None) -> np.ndarray:
    if freq.is_2d:
        f = build_matrix_2d(freq, shape[0], shape[1]).entries
    else:
        f = build_matrix(freq, shape if np.isscalar(shape) else shape[0]).entries
    if basis is None or basis.kind == "canonical":
        return f
    return basis.analyze_rows(f)


_warned_ambiguity: set[tuple[float, float]] = set()


def _ambiguity_warning(freq: FrequencySet, r: float):
    if freq.is_2d or freq.M < 2:
        return
    gaps = np.diff(np.sort(freq.u))
    min_gap = float(gaps.min()) if len(gaps) else np.inf
    key = (r, min_gap)
    if r >= 0.5 * min_gap and key not in _warned_ambiguity:
        _warned_ambiguity.add(key)
        warnings.warn(
            f"perturbation bound r={r:g} is not below half the smallest base "
            f"frequency gap ({min_gap:g}); delta estimates may be ambiguous",
            stacklevel=3,
        )


def alternating_recovery(y: np.ndarray, freq: FrequencySet,
                         model: PerturbationModel, shape,
                         solver_cfg: SolverConfig, altmin_cfg: AltMinConfig,
                         start_seed: int,
                         basis: SparsityBasis | None = None) -> RecoveryResult:
    """One alternating run from a random perturbation initialization.

    ``shape`` is the signal length (1D) or image shape (2D); ``basis``
    defaults to canonical.  The initial parameters are drawn from
    Uniform[-r, r] and snapped to the search grid.
    """
    y = np.asarray(y, dtype=complex)
    shape_t = (shape,) if np.isscalar(shape) else tuple(shape)
    if basis is None:
        basis = SparsityBasis("canonical", shape_t if len(shape_t) > 1 else shape_t[0])

    rng = np.random.default_rng(start_seed)
    grid = perturbation_grid(model.r, altmin_cfg.grid_step)
    beta = _snap_to_grid(rng.uniform(-model.r, model.r, model.P), grid)
    delta = expand(model, beta)
    _ambiguity_warning(freq, model.r)

    coeffs = np.zeros(basis.size)
    x_signal = np.zeros(shape_t) if len(shape_t) > 1 else np.zeros(shape_t[0])
    trace: list[float] = []
    ties = 0
    converged = False
    solver_ok = True
    n_outer = 0

    for n_outer in range(1, altmin_cfg.max_outer_iters + 1):
        beta_prev, delta_prev, x_prev = beta, delta, x_signal

        cur = freq.with_delta(delta)
        a = _sensing_matrix(cur, shape_t if len(shape_t) > 1 else shape_t[0],
                            basis)
        report = solve_sqlasso(a, y, solver_cfg, x0=coeffs)
        solver_ok = solver_ok and report.converged
        coeffs = report.x_hat
        x_flat = basis.synthesize(coeffs)
        x_signal = x_flat.reshape(shape_t) if len(shape_t) > 1 else x_flat
        trace.append(report.objective)

        beta, t = beta_search_grouped(y, freq, x_signal, model,
                                      altmin_cfg.grid_step,
                                      refine=altmin_cfg.refine, prev_beta=beta)
        ties += t
        delta = expand(model, beta)
        a = _sensing_matrix(freq.with_delta(delta),
                            shape_t if len(shape_t) > 1 else shape_t[0],
                            basis)
        res = np.linalg.norm(y - a @ coeffs)
        trace.append(float(np.abs(coeffs).sum()) + solver_cfg.lam * res)

        dx = np.linalg.norm(np.ravel(x_signal) - np.ravel(x_prev))
        dd = np.linalg.norm(np.ravel(delta) - np.ravel(delta_prev))
        if dx < altmin_cfg.chi and dd < altmin_cfg.chi:
            converged = True
            break

    if ties:
        logger.debug("grid argmin was non-unique in %d half-steps", ties)
    return RecoveryResult(
        x_hat=x_signal,
        delta_hat=delta,
        beta_hat=beta,
        objective_trace=np.asarray(trace),
        converged=converged and solver_ok,
        coeffs=coeffs,
        tie_events=ties,
        n_outer=n_outer,
    )


def multistart(y: np.ndarray, freq: FrequencySet, model: PerturbationModel,
               shape, solver_cfg: SolverConfig, altmin_cfg: AltMinConfig,
               basis: SparsityBasis | None = None) -> RecoveryResult:
    """Run ``num_starts`` alternating recoveries (start i seeds with seed+i)
    and return the one with the smallest final objective."""
    best: RecoveryResult | None = None
    for i in range(altmin_cfg.num_starts):
        res = alternating_recovery(y, freq, model, shape, solver_cfg,
                                   altmin_cfg, altmin_cfg.seed + i, basis=basis)
        res.start_index = i
        if best is None or res.objective < best.objective:
            best = res
    return best
