"""Data generation, metrics, and the reproducible sweep harness.

A sweep runs a full factorial over sparsity levels, measurement counts,
methods and trials.  Base frequencies are drawn once per measurement-count
cell and shared by every trial in that cell; signals, perturbations and
noise are redrawn per trial from seeds derived deterministically from the
master seed, so the whole sweep is reproducible bit for bit.  Records
stream to CSV as they are produced and a killed sweep can resume without
duplicating rows.
"""

from __future__ import annotations

import csv
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .altmin import AltMinConfig, multistart
from .bases import SparsityBasis
from .baselines import baseline1, baseline2
from .operators import FrequencySet, build_matrix, forward, forward_2d
from .perturbations import (PerturbationModel, expand,
                            identity_group_model, independent_model,
                            make_radial_spokes)
from .solvers import SolverConfig, default_lambda

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["N", "basis", "s", "M", "r", "delta_u", "noise_pct", "method",
               "trial", "seed", "rrmse", "objective", "wall_time_ms",
               "converged"]

METHODS = ("altmin", "baseline1", "baseline2", "linearized")

LAMBDA_CV_GRID = (0.01, 0.03, 0.1, 0.3, 1.0, 3.0)


def _seed_int(*entropy: int) -> int:
    """Stable 63-bit seed derived from a tuple of integers."""
    ss = np.random.SeedSequence(list(entropy))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> 1)


def gen_sparse_signal(shape, s: int, basis: SparsityBasis,
                      seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Exactly ``s`` standard-normal nonzeros on a uniformly random support
    in the basis coefficients.  Returns ``(signal, coefficients)``."""
    size = basis.size
    if not 0 <= s <= size:
        raise ValueError("need 0 <= s <= signal size")
    rng = np.random.default_rng(seed)
    theta = np.zeros(size)
    support = rng.choice(size, size=s, replace=False)
    theta[support] = rng.standard_normal(s)
    x = basis.synthesize(theta)
    if not np.isscalar(shape) and len(tuple(np.atleast_1d(shape))) > 1:
        return x.reshape(tuple(shape)), theta
    return x, theta


def gen_frequencies(m: int, n: int, seed: int, r: float = 0.0) -> FrequencySet:
    """Distinct sorted base frequencies drawn uniformly from the integer
    grid ``{-floor(N/2), ..., +floor(N/2)}`` without replacement."""
    grid = np.arange(-(n // 2), n // 2 + 1)
    if m > len(grid):
        raise ValueError(f"cannot draw {m} distinct frequencies from "
                         f"{len(grid)} grid points")
    rng = np.random.default_rng(seed)
    u = np.sort(rng.choice(grid, size=m, replace=False)).astype(float)
    return FrequencySet(u, np.zeros(m), r=r)


def gen_antisymmetric_frequencies(m: int, n: int, seed: int, r: float = 0.0,
                                  jitter: float = 0.3) -> FrequencySet:
    """Separated random frequencies paired as u[i] = -u[M-1-i].

    Positive frequencies sit one per bin over (0, N/2) with uniform jitter,
    mirrored about zero; odd M adds the zero frequency.  This is the
    sampling pattern assumed by the linearized-model pipeline.
    """
    k = m // 2
    rng = np.random.default_rng(seed)
    pos = (np.arange(k) + 0.5 + rng.uniform(-jitter, jitter, k)) \
        * ((n / 2 - 0.5) / k)
    parts = [-pos[::-1], pos] if m % 2 == 0 else [-pos[::-1], [0.0], pos]
    u = np.concatenate(parts)
    return FrequencySet(u, np.zeros(m), r=r)


def min_frequency_gap(freq: FrequencySet) -> float:
    u = np.sort(freq.u) if not freq.is_2d else None
    if u is None or len(u) < 2:
        return np.inf
    return float(np.diff(u).min())


def add_noise(y: np.ndarray, pct: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian noise, sigma = pct * mean measurement magnitude, added to
    real and imaginary parts independently.  Returns (noisy, noise)."""
    if pct < 0:
        raise ValueError("noise percentage must be >= 0")
    y = np.asarray(y, dtype=complex)
    if pct == 0:
        return y.copy(), np.zeros_like(y)
    rng = np.random.default_rng(seed)
    sigma = pct * np.abs(y).mean()
    eta = sigma * (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape))
    return y + eta, eta


def rrmse(x_true: np.ndarray, x_hat: np.ndarray) -> float:
    """Relative recovery error ||x - x_hat|| / ||x||."""
    xt = np.ravel(np.asarray(x_true, dtype=float))
    xh = np.ravel(np.asarray(x_hat, dtype=float))
    nt = np.linalg.norm(xt)
    if nt == 0:
        raise ValueError("x_true must be nonzero")
    return float(np.linalg.norm(xt - xh) / nt)


@dataclass(frozen=True)
class ExperimentSpec:
    n: int
    basis: str = "canonical"
    s_list: tuple[int, ...] = (5,)
    m_list: tuple[int, ...] = (70,)
    r: float = 1.0
    delta_u: int | str = 2            # group count, or "M" for independent
    noise_pct: float = 0.0
    trials: int = 5
    seed: int = 0
    methods: tuple[str, ...] = ("altmin",)
    lam: float | None = None          # None -> 0.1*sqrt(M)
    num_starts: int = 10
    grid_step: float | None = None
    chi: float = 1e-4
    max_outer_iters: int = 50
    refine: bool = False
    solver_max_iters: int = 5000
    solver_tol: float = 1e-9

    def __post_init__(self):
        if not self.methods:
            raise ValueError("method list must not be empty")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        for s in self.s_list:
            if not 0 < s < self.n:
                raise ValueError("sparsity must satisfy 0 < s < N")
        for m in self.m_list:
            if m > self.n:
                raise ValueError("M > N is rejected for 1D sweeps")
        if self.delta_u != "M" and int(self.delta_u) < 1:
            raise ValueError("delta_u must be a positive count or 'M'")
        if self.basis not in ("canonical", "haar1d"):
            raise ValueError("1D sweeps support canonical or haar1d bases")
        if self.basis == "haar1d" and (self.n & (self.n - 1)) != 0:
            raise ValueError("haar1d sweeps need a dyadic signal length")


@dataclass
class ResultRecord:
    n: int
    basis: str
    s: int
    m: int
    r: float
    delta_u: int | str
    noise_pct: float
    method: str
    trial: int
    seed: int
    rrmse: float
    objective: float
    wall_time_ms: float
    converged: bool

    def row(self) -> list[str]:
        return [str(self.n), self.basis, str(self.s), str(self.m),
                repr(float(self.r)), str(self.delta_u),
                repr(float(self.noise_pct)), self.method, str(self.trial),
                str(self.seed), repr(float(self.rrmse)),
                repr(float(self.objective)), repr(float(self.wall_time_ms)),
                str(self.converged)]

    def key(self) -> tuple:
        return tuple(self.row()[:10])


@dataclass
class Instance1D:
    x: np.ndarray
    theta: np.ndarray
    freq: FrequencySet          # base frequencies, delta = 0
    freq_true: FrequencySet     # with the true perturbations
    model: PerturbationModel
    beta_true: np.ndarray
    y: np.ndarray
    basis: SparsityBasis
    method_seed: int


def perturbation_model_for(m: int, delta_u: int | str, r: float) -> PerturbationModel:
    if delta_u == "M" or int(delta_u) >= m:
        return independent_model(m, r)
    return identity_group_model(m, int(delta_u), r)


def build_instance(spec: ExperimentSpec, m: int, s: int, trial: int) -> Instance1D:
    """Deterministic 1D problem instance for one sweep cell and trial."""
    basis = SparsityBasis(spec.basis, spec.n)
    freq = gen_frequencies(m, spec.n, _seed_int(spec.seed, 1, m), r=spec.r)
    model = perturbation_model_for(m, spec.delta_u, spec.r)
    x, theta = gen_sparse_signal(spec.n, s, basis,
                                 _seed_int(spec.seed, 2, m, s, trial))
    rng = np.random.default_rng(_seed_int(spec.seed, 3, m, s, trial))
    beta_true = rng.uniform(-spec.r, spec.r, model.P)
    freq_true = freq.with_delta(expand(model, beta_true))
    y_clean = forward(x, freq_true)
    y, _ = add_noise(y_clean, spec.noise_pct, _seed_int(spec.seed, 4, m, s, trial))
    return Instance1D(x=x, theta=theta, freq=freq, freq_true=freq_true,
                      model=model, beta_true=beta_true, y=y, basis=basis,
                      method_seed=_seed_int(spec.seed, 5, m, s, trial))


def _configs(spec: ExperimentSpec, m: int, method_seed: int
             ) -> tuple[SolverConfig, AltMinConfig]:
    lam = spec.lam if spec.lam is not None else default_lambda(m)
    solver_cfg = SolverConfig(lam=lam, max_iters=spec.solver_max_iters,
                              tol=spec.solver_tol)
    altmin_cfg = AltMinConfig(grid_step=spec.grid_step, chi=spec.chi,
                              max_outer_iters=spec.max_outer_iters,
                              num_starts=spec.num_starts, seed=method_seed,
                              refine=spec.refine)
    return solver_cfg, altmin_cfg


def check_monotone_trace(trace: np.ndarray, slack: float = 1e-9):
    """Half-step objective traces must never rise beyond float slack."""
    diffs = np.diff(np.asarray(trace))
    if diffs.size and diffs.max() > slack:
        raise AssertionError(
            f"objective trace rose by {diffs.max():.3e} in a half-step")


@dataclass
class MethodRun:
    rrmse: float
    objective: float
    converged: bool
    x_hat: np.ndarray
    delta_hat: np.ndarray | None


def run_method_detailed(method: str, inst: Instance1D, spec: ExperimentSpec,
                        m: int, s: int) -> MethodRun:
    """Run one recovery method on an instance, keeping the estimates."""
    solver_cfg, altmin_cfg = _configs(spec, m, inst.method_seed)
    if method == "altmin":
        res = multistart(inst.y, inst.freq, inst.model, spec.n, solver_cfg,
                         altmin_cfg, basis=inst.basis)
        check_monotone_trace(res.objective_trace)
        return MethodRun(rrmse(inst.x, res.x_hat), res.objective,
                         res.converged, res.x_hat, res.delta_hat)
    if method == "baseline1":
        rep = baseline1(inst.y, inst.freq, spec.n, solver_cfg, basis=inst.basis)
        return MethodRun(rrmse(inst.x, rep.x_hat), rep.objective,
                         rep.converged, rep.x_hat, None)
    if method == "baseline2":
        rep = baseline2(inst.y, inst.freq, spec.n, spec.r, solver_cfg,
                        altmin_cfg, basis=inst.basis)
        check_monotone_trace(rep.objective_trace)
        return MethodRun(rrmse(inst.x, rep.x_hat), rep.objective,
                         rep.converged, rep.x_hat, rep.delta_hat)
    if method == "linearized":
        # unclamped Taylor alternation on the true-model data (the reduced
        # linear-model solver needs anti-symmetric sampling; see linearized)
        from .baselines import taylor_alternation
        from .operators import derivative_matrix

        f0 = build_matrix(inst.freq, spec.n).entries
        fp = derivative_matrix(inst.freq.u, spec.n).entries
        basis_matrix = None if inst.basis.kind == "canonical" \
            else inst.basis.matrix()
        x_hat, delta, trace, conv = taylor_alternation(
            inst.y, f0, fp, None, solver_cfg, altmin_cfg.chi,
            altmin_cfg.max_outer_iters, np.zeros(m), basis_matrix)
        x_sig = x_hat if basis_matrix is None else basis_matrix @ x_hat
        return MethodRun(rrmse(inst.x, x_sig), float(trace[-1]), conv,
                         x_sig, delta)
    raise ValueError(f"unknown method {method!r}")


def run_method(method: str, inst: Instance1D, spec: ExperimentSpec,
               m: int, s: int) -> tuple[float, float, bool]:
    """Run one recovery method on an instance; returns (rrmse, objective,
    converged)."""
    run = run_method_detailed(method, inst, spec, m, s)
    return run.rrmse, run.objective, run.converged


def _run_cell(args: tuple) -> list[ResultRecord]:
    spec, m, s, trial = args
    inst = build_instance(spec, m, s, trial)
    records = []
    for method in spec.methods:
        t0 = time.perf_counter()
        try:
            err, obj, conv = run_method(method, inst, spec, m, s)
        except Exception:
            logger.exception("cell failed: method=%s M=%d s=%d trial=%d",
                             method, m, s, trial)
            continue
        ms = (time.perf_counter() - t0) * 1e3
        records.append(ResultRecord(
            n=spec.n, basis=spec.basis, s=s, m=m, r=spec.r,
            delta_u=spec.delta_u, noise_pct=spec.noise_pct, method=method,
            trial=trial, seed=inst.method_seed, rrmse=err, objective=obj,
            wall_time_ms=ms, converged=conv))
    return records


def _existing_keys(path: str) -> set[tuple]:
    keys = set()
    if path and os.path.exists(path):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != CSV_COLUMNS:
                raise ValueError(f"{path} does not match the sweep CSV schema")
            for row in reader:
                keys.add(tuple(row[:10]))
    return keys


def run_sweep(spec: ExperimentSpec, out_path: str | None = None,
              resume: bool = False, workers: int = 1,
              timing: bool = False, strict: bool = False) -> list[ResultRecord]:
    """Full factorial over (M, s, trial, method), streamed to CSV.

    Wall times are written as 0.0 unless ``timing`` is set, keeping the
    default output byte-identical across runs of the same spec and seed.
    Failed cells are logged and skipped; with ``strict`` the sweep still
    runs to completion but raises afterwards if anything failed.
    """
    done = _existing_keys(out_path) if (resume and out_path) else set()
    cells = [(spec, m, s, trial)
             for m in spec.m_list for s in spec.s_list
             for trial in range(spec.trials)]

    writer = None
    fh = None
    if out_path:
        new_file = not (resume and os.path.exists(out_path))
        fh = open(out_path, "w" if new_file else "a", newline="")
        writer = csv.writer(fh)
        if new_file:
            writer.writerow(CSV_COLUMNS)

    all_records: list[ResultRecord] = []
    n_failed = 0

    def emit(records: list[ResultRecord]):
        nonlocal n_failed
        n_failed += len(spec.methods) - len(records)
        for rec in records:
            if not timing:
                rec.wall_time_ms = 0.0
            if rec.key() in done:
                continue
            all_records.append(rec)
            if writer is not None:
                writer.writerow(rec.row())
                fh.flush()

    try:
        if workers <= 1:
            for cell in cells:
                emit(_run_cell(cell))
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for records in pool.map(_run_cell, cells):
                    emit(records)
    finally:
        if fh is not None:
            fh.close()
    if strict and n_failed:
        raise RuntimeError(f"{n_failed} sweep cells failed (see log)")
    return all_records


def cross_validate_lambda(spec: ExperimentSpec, m: int, s: int,
                          method: str = "altmin", n_train: int = 3,
                          grid: tuple[float, ...] = LAMBDA_CV_GRID) -> float:
    """Pick the data-fit weight minimizing mean RRMSE over a small training
    set of signals: candidates are ``grid`` scaled by sqrt(M)."""
    best_lam, best_err = None, np.inf
    for scale in grid:
        lam = scale * np.sqrt(m)
        trial_spec = ExperimentSpec(
            n=spec.n, basis=spec.basis, s_list=(s,), m_list=(m,), r=spec.r,
            delta_u=spec.delta_u, noise_pct=spec.noise_pct, trials=n_train,
            seed=_seed_int(spec.seed, 99), methods=(method,), lam=lam,
            num_starts=min(spec.num_starts, 3), grid_step=spec.grid_step,
            chi=spec.chi, max_outer_iters=spec.max_outer_iters)
        errs = [rec.rrmse for rec in run_sweep(trial_spec)]
        mean_err = float(np.mean(errs)) if errs else np.inf
        if mean_err < best_err:
            best_lam, best_err = lam, mean_err
    return best_lam


@dataclass
class Tomo2DReport:
    image: np.ndarray
    altmin_x: np.ndarray
    baseline1_x: np.ndarray
    altmin_rrmse: float
    baseline1_rrmse: float
    beta_true: np.ndarray
    beta_hat: np.ndarray
    converged: bool


def run_tomo2d(n_spokes: int, per_spoke: int, image_size: int,
               angle_err_deg: float, noise_pct: float, seed: int,
               s: int | None = None, lam: float | None = None,
               num_starts: int = 3, max_outer_iters: int = 60,
               grid_step: float | None = None,
               solver_tol: float = 1e-5) -> Tomo2DReport:
    """Desk-scale radial tomography demo: grouped-angle recovery of a
    Haar-sparse image versus the perturbation-ignoring baseline.

    The per-spoke angle search moves in small steps each outer iteration,
    so the default budget favors long alternations over many restarts; the
    solver tolerance is loosened to match (the final signal estimate is
    noise-limited well above it).
    """
    if image_size > 32 or (image_size & (image_size - 1)) != 0:
        raise ValueError("image_size must be dyadic and <= 32")
    r_beta = np.deg2rad(angle_err_deg)
    freq, model = make_radial_spokes(n_spokes, per_spoke, image_size, r_beta)
    basis = SparsityBasis("haar2d", (image_size, image_size))
    if s is None:
        s = max(4, image_size * image_size // 64)
    img, _theta = gen_sparse_signal((image_size, image_size), s, basis,
                                    _seed_int(seed, 11))
    rng = np.random.default_rng(_seed_int(seed, 12))
    beta_true = rng.uniform(-r_beta, r_beta, model.P)
    freq_true = freq.with_delta(expand(model, beta_true))
    y, _ = add_noise(forward_2d(img, freq_true), noise_pct, _seed_int(seed, 13))

    m = freq.M
    lam = lam if lam is not None else default_lambda(m)
    solver_cfg = SolverConfig(lam=lam, tol=solver_tol)
    altmin_cfg = AltMinConfig(grid_step=grid_step, num_starts=num_starts,
                              seed=_seed_int(seed, 14),
                              max_outer_iters=max_outer_iters)

    res = multistart(y, freq, model, (image_size, image_size), solver_cfg,
                     altmin_cfg, basis=basis)
    check_monotone_trace(res.objective_trace)
    base = baseline1(y, freq, (image_size, image_size), solver_cfg, basis=basis)
    return Tomo2DReport(
        image=img, altmin_x=res.x_hat, baseline1_x=base.x_hat,
        altmin_rrmse=rrmse(img, res.x_hat),
        baseline1_rrmse=rrmse(img, base.x_hat),
        beta_true=beta_true, beta_hat=res.beta_hat, converged=res.converged)
