"""Command-line entry point.

Subcommands: recover, sweep, analyze, linearized, tomo2d.  Each takes a
JSON config document (--config) whose keys are validated against the
subcommand schema -- unknown keys are rejected by name.  The flags
--out/--seed/--workers override config values (precedence: flags > config >
defaults).  All outputs are CSV (plus a small JSON report for analyze) and
are deterministic for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from .analysis import expectation_recovery_experiment, verify_coherence_bound
from .bases import SparsityBasis
from .experiments import (CSV_COLUMNS, ExperimentSpec, ResultRecord,
                          build_instance, gen_antisymmetric_frequencies,
                          gen_frequencies, gen_sparse_signal, rrmse,
                          run_method_detailed, run_sweep, run_tomo2d)
from .linearized import forward_linearized, solve_linearized_compressive, solve_linearized_exact
from .solvers import SolverConfig, default_lambda


class ConfigError(ValueError):
    pass


_REQUIRED = object()


def _validate(cfg: dict, schema: dict, where: str = "config") -> dict:
    """Fill defaults, reject unknown keys, recurse into nested sections."""
    if not isinstance(cfg, dict):
        raise ConfigError(f"{where} must be an object")
    out = {}
    for key, value in cfg.items():
        if key not in schema:
            raise ConfigError(f"unknown key {key!r} in {where}")
    for key, default in schema.items():
        if isinstance(default, dict):
            out[key] = _validate(cfg.get(key, {}), default, f"{where}.{key}")
        elif key in cfg:
            out[key] = cfg[key]
        elif default is _REQUIRED:
            raise ConfigError(f"missing required key {key!r} in {where}")
        else:
            out[key] = default
    return out


_SOLVER_SCHEMA = {"lam": None, "max_iters": 5000, "tol": 1e-9}
_ALTMIN_SCHEMA = {"num_starts": 10, "grid_step": None, "chi": 1e-4,
                  "max_outer_iters": 50, "refine": False}

RECOVER_SCHEMA = {
    "n": _REQUIRED, "m": _REQUIRED, "s": _REQUIRED, "r": 1.0, "delta_u": "M",
    "noise_pct": 0.0, "basis": "canonical", "method": "altmin", "seed": 0,
    "solver": _SOLVER_SCHEMA, "altmin": _ALTMIN_SCHEMA,
}

SWEEP_SCHEMA = {
    "n": _REQUIRED, "basis": "canonical", "s_list": _REQUIRED,
    "m_list": _REQUIRED, "r": 1.0, "delta_u": "M", "noise_pct": 0.0,
    "trials": 5, "methods": _REQUIRED, "seed": 0, "lam": None,
    "num_starts": 10, "grid_step": None, "chi": 1e-4, "max_outer_iters": 50,
    "timing": False,
}

ANALYZE_SCHEMA = {
    "n": 32, "m": 16, "r": 0.5, "n_mc": 0, "seed": 0,
    "g_experiment": {"s": 5, "r_list": [0.0, 0.25, 0.5, 1.0],
                     "noise_pct": 0.0, "trials": 3, "lam": None},
}

LINEARIZED_SCHEMA = {
    "mode": "exact", "n": 41, "delta_r": 0.5, "seed": 0,
    "s": 20, "m_list": [100, 80, 60, 40], "trials": 5, "lam": None,
}

TOMO2D_SCHEMA = {
    "image_size": 32, "n_spokes": 20, "per_spoke": 16, "angle_err_deg": 2.0,
    "noise_pct": 0.05, "s": 16, "seed": 0, "num_starts": 10,
    "max_outer_iters": 30, "lam": None,
}


def _load_config(path: str | None, schema: dict) -> dict:
    raw = {}
    if path:
        with open(path) as fh:
            raw = json.load(fh)
    return _validate(raw, schema)


def _write_vector_csv(path: str, values: np.ndarray):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "value"])
        for i, v in enumerate(np.ravel(values)):
            writer.writerow([i, repr(float(v))])


def _outdir(args) -> str:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def cmd_recover(args) -> int:
    cfg = _load_config(args.config, RECOVER_SCHEMA)
    if args.seed is not None:
        cfg["seed"] = args.seed
    out = _outdir(args)

    spec = ExperimentSpec(
        n=cfg["n"], basis=cfg["basis"], s_list=(cfg["s"],),
        m_list=(cfg["m"],), r=cfg["r"], delta_u=cfg["delta_u"],
        noise_pct=cfg["noise_pct"], trials=1, seed=cfg["seed"],
        methods=(cfg["method"],), lam=cfg["solver"]["lam"],
        num_starts=cfg["altmin"]["num_starts"],
        grid_step=cfg["altmin"]["grid_step"], chi=cfg["altmin"]["chi"],
        max_outer_iters=cfg["altmin"]["max_outer_iters"],
        refine=cfg["altmin"]["refine"],
        solver_max_iters=cfg["solver"]["max_iters"],
        solver_tol=cfg["solver"]["tol"])
    inst = build_instance(spec, cfg["m"], cfg["s"], trial=0)
    run = run_method_detailed(cfg["method"], inst, spec, cfg["m"], cfg["s"])

    rec = ResultRecord(n=spec.n, basis=spec.basis, s=cfg["s"], m=cfg["m"],
                       r=spec.r, delta_u=spec.delta_u,
                       noise_pct=spec.noise_pct, method=cfg["method"],
                       trial=0, seed=inst.method_seed, rrmse=run.rrmse,
                       objective=run.objective, wall_time_ms=0.0,
                       converged=run.converged)
    with open(os.path.join(out, "result.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        writer.writerow(rec.row())

    _write_vector_csv(os.path.join(out, "x_hat.csv"), run.x_hat)
    if run.delta_hat is not None:
        _write_vector_csv(os.path.join(out, "delta_hat.csv"), run.delta_hat)
    _write_vector_csv(os.path.join(out, "x_true.csv"), inst.x)
    print(f"rrmse={run.rrmse:.6g} objective={run.objective:.6g} "
          f"converged={run.converged}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config, SWEEP_SCHEMA)
    if args.seed is not None:
        cfg["seed"] = args.seed
    out_path = args.out or "sweep.csv"
    spec = ExperimentSpec(
        n=cfg["n"], basis=cfg["basis"], s_list=tuple(cfg["s_list"]),
        m_list=tuple(cfg["m_list"]), r=cfg["r"], delta_u=cfg["delta_u"],
        noise_pct=cfg["noise_pct"], trials=cfg["trials"], seed=cfg["seed"],
        methods=tuple(cfg["methods"]), lam=cfg["lam"],
        num_starts=cfg["num_starts"], grid_step=cfg["grid_step"],
        chi=cfg["chi"], max_outer_iters=cfg["max_outer_iters"])
    workers = args.workers if args.workers else (os.cpu_count() or 1)
    try:
        records = run_sweep(spec, out_path=out_path, resume=args.resume,
                            workers=workers, timing=cfg["timing"],
                            strict=True)
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(records)} records to {out_path}")
    return 0


def cmd_analyze(args) -> int:
    cfg = _load_config(args.config, ANALYZE_SCHEMA)
    if args.seed is not None:
        cfg["seed"] = args.seed
    out = _outdir(args)
    freq = gen_frequencies(cfg["m"], cfg["n"], cfg["seed"])
    report = verify_coherence_bound(freq, cfg["r"], cfg["n"],
                                    n_mc=cfg["n_mc"], seed=cfg["seed"])
    payload = {"mu": report.mu, "mu_t": report.mu_t, "bound": report.bound,
               "max_sinc": report.max_sinc,
               "mc_max_abs_dev": report.mc_max_abs_dev,
               "mc_max_se_ratio": report.mc_max_se_ratio,
               "chain_holds": bool(report.mu_t <= report.bound + 1e-9
                                   <= report.mu + 2e-9)}
    with open(os.path.join(out, "coherence_report.json"), "w") as fh:
        json.dump(payload, fh, indent=2, allow_nan=True)

    gx = cfg["g_experiment"]
    lam = gx["lam"] if gx["lam"] is not None else default_lambda(cfg["m"])
    basis = SparsityBasis("canonical", cfg["n"])
    with open(os.path.join(out, "g_experiment.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "trial", "abs_error", "rel_error", "model_gap"])
        for trial in range(gx["trials"]):
            x, _ = gen_sparse_signal(cfg["n"], gx["s"], basis,
                                     cfg["seed"] + 1000 + trial)
            for r_val in gx["r_list"]:
                rep = expectation_recovery_experiment(
                    x, freq, r_val, gx["noise_pct"], SolverConfig(lam=lam),
                    seed=cfg["seed"] + trial)
                writer.writerow([repr(float(r_val)), trial,
                                 repr(rep.abs_error), repr(rep.rel_error),
                                 repr(rep.model_gap)])
    print(f"mu={report.mu:.6g} bound={report.bound:.6g} mu_t={report.mu_t:.6g}")
    return 0


def cmd_linearized(args) -> int:
    cfg = _load_config(args.config, LINEARIZED_SCHEMA)
    if args.seed is not None:
        cfg["seed"] = args.seed
    out = _outdir(args)
    rng = np.random.default_rng(cfg["seed"])
    if cfg["mode"] == "exact":
        n = cfg["n"]
        if n % 2 == 0:
            raise ConfigError("exact mode requires odd n")
        freq = gen_antisymmetric_frequencies(n, n, cfg["seed"],
                                             r=cfg["delta_r"])
        x = rng.standard_normal(n)
        delta = rng.uniform(-cfg["delta_r"], cfg["delta_r"], n)
        y = forward_linearized(x, delta, freq)
        sol = solve_linearized_exact(y, freq)
        x_err = np.linalg.norm(sol.x_hat - x) / np.linalg.norm(x)
        d_err = np.abs(sol.delta_hat - delta)[sol.delta_reliable].max()
        _write_vector_csv(os.path.join(out, "x_hat.csv"), sol.x_hat)
        _write_vector_csv(os.path.join(out, "delta_hat.csv"), sol.delta_hat)
        print(f"x_rel_err={x_err:.3e} delta_max_err={d_err:.3e} "
              f"cond_H={sol.h_condition:.3e}")
        return 0
    if cfg["mode"] != "compressive":
        raise ConfigError("mode must be 'exact' or 'compressive'")
    n = cfg["n"]
    basis = SparsityBasis("canonical", n)
    with open(os.path.join(out, "linearized_curve.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m", "trial", "rel_error"])
        for m in cfg["m_list"]:
            lam = cfg["lam"] if cfg["lam"] is not None else 10.0 * np.sqrt(m)
            for trial in range(cfg["trials"]):
                trial_rng = np.random.default_rng(cfg["seed"] + 7919 * trial + m)
                x, _ = gen_sparse_signal(n, cfg["s"], basis,
                                         cfg["seed"] + 31 * trial + m)
                freq = gen_antisymmetric_frequencies(
                    m, n, cfg["seed"] + 17 * trial, r=cfg["delta_r"])
                delta = trial_rng.uniform(-cfg["delta_r"], cfg["delta_r"], m)
                from .operators import build_matrix, derivative_matrix
                f0 = build_matrix(freq, n).entries
                fp = derivative_matrix(freq.u, n).entries
                y = f0 @ x - 1j * delta * (fp @ x)
                x_hat, _ = solve_linearized_compressive(
                    y, freq, n, SolverConfig(lam=lam))
                writer.writerow([m, trial,
                                 repr(float(rrmse(x, x_hat)))])
    print(f"wrote linearized_curve.csv for m_list={cfg['m_list']}")
    return 0


def cmd_tomo2d(args) -> int:
    cfg = _load_config(args.config, TOMO2D_SCHEMA)
    if args.seed is not None:
        cfg["seed"] = args.seed
    out = _outdir(args)
    rep = run_tomo2d(cfg["n_spokes"], cfg["per_spoke"], cfg["image_size"],
                     cfg["angle_err_deg"], cfg["noise_pct"], cfg["seed"],
                     s=cfg["s"], lam=cfg["lam"], num_starts=cfg["num_starts"],
                     max_outer_iters=cfg["max_outer_iters"])
    with open(os.path.join(out, "tomo2d_report.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "rrmse"])
        writer.writerow(["altmin", repr(rep.altmin_rrmse)])
        writer.writerow(["baseline1", repr(rep.baseline1_rrmse)])
    _write_vector_csv(os.path.join(out, "image_true.csv"), rep.image)
    _write_vector_csv(os.path.join(out, "image_altmin.csv"), rep.altmin_x)
    _write_vector_csv(os.path.join(out, "image_baseline1.csv"), rep.baseline1_x)
    print(f"altmin_rrmse={rep.altmin_rrmse:.6g} "
          f"baseline1_rrmse={rep.baseline1_rrmse:.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fouriercal",
        description="Sparse recovery with blind Fourier frequency calibration")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, descr in [
        ("recover", cmd_recover, "single multistart recovery"),
        ("sweep", cmd_sweep, "factorial benchmark sweep to CSV"),
        ("analyze", cmd_analyze, "coherence bound and expectation model"),
        ("linearized", cmd_linearized, "linear-model exact solve / error curve"),
        ("tomo2d", cmd_tomo2d, "radial tomography demo"),
    ]:
        p = sub.add_parser(name, help=descr)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output path (directory or CSV)")
        p.add_argument("--seed", type=int, help="override config seed")
        p.add_argument("--workers", type=int, help="parallel workers (sweep)")
        p.add_argument("--resume", action="store_true",
                       help="skip already-completed sweep rows")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
