"""Exact recovery under the linearized measurement model.

The first-order expansion of the perturbed Fourier operator is

    y = (F - i * diag(delta) * F X) x,      X = diag(2*pi*l/N),

with ``l`` the centered spatial index.  When M = N (odd), the base
frequencies form an anti-symmetric set (``u[m-k] = -u[m+k]`` about the
middle index, middle frequency 0), the signal has both an even and an odd
part, and no two measurements are conjugate-symmetric, both ``x`` and
``delta`` can be recovered exactly by direct linear algebra: splitting
everything into cosine/sine blocks and even/odd signal parts collapses the
bilinear system into one linear solve ``g = H w`` for the independent half
of the signal, after which ``delta`` follows row by row.

For M < N the same pair elimination still applies; it just leaves fewer
equations than unknowns, so the reduced system is solved by minimum-l1
recovery instead of direct inversion (the data are generated by the linear
model itself, hence noiseless and exactly consistent).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

import scipy.optimize

from .operators import FrequencySet, build_matrix, centered_indices, derivative_matrix
from .solvers import SolverConfig


class DegenerateMeasurements(ValueError):
    """A paired measurement difference vanished: either the signal is purely
    even/odd or two perturbations cancel (conjugate-symmetric measurements),
    so the block system cannot be formed."""


class SingularH(ValueError):
    """The assembled block matrix H is numerically singular."""


@dataclass
class LinearizedSolution:
    x_hat: np.ndarray
    delta_hat: np.ndarray
    e0: float
    e1: np.ndarray
    o1: np.ndarray
    h_condition: float
    delta_reliable: np.ndarray


def _check_antisymmetric(u: np.ndarray, tol: float = 1e-9):
    if not np.allclose(u + u[::-1], 0.0, atol=tol):
        raise ValueError("frequencies must satisfy u[m-k] = -u[m+k] with a "
                         "zero middle frequency")


def forward_linearized(x: np.ndarray, delta: np.ndarray,
                       freq: FrequencySet) -> np.ndarray:
    """Evaluate the linear model ``(F - i diag(delta) F X) x`` exactly."""
    x = np.asarray(x, dtype=float)
    delta = np.asarray(delta, dtype=float)
    n = x.shape[0]
    if freq.is_2d:
        raise ValueError("linearized model is 1D")
    if freq.M != n or n % 2 == 0:
        raise ValueError("linearized pipeline requires M = N odd")
    _check_antisymmetric(freq.u)
    f = build_matrix(freq.with_delta(np.zeros(freq.M)), n).entries
    fp = derivative_matrix(freq.u, n).entries
    return f @ x - 1j * delta * (fp @ x)


def solve_linearized_exact(y: np.ndarray, freq: FrequencySet,
                   tiny: float = 1e-12) -> LinearizedSolution:
    """Recover (x, delta) from linear-model measurements at M = N.

    Raises :class:`DegenerateMeasurements` when a paired difference needed
    to form the diagonal ratio matrix vanishes, and :class:`SingularH` when
    the final block system is numerically singular.  Rows whose delta
    denominator is tiny are returned with ``delta_reliable`` False and
    ``delta_hat`` 0 there.
    """
    y = np.asarray(y, dtype=complex)
    m = y.shape[0]
    n = m
    if m % 2 == 0:
        raise ValueError("M = N must be odd")
    if freq.M != m:
        raise ValueError("measurement count does not match frequency set")
    _check_antisymmetric(freq.u)

    # conjugating the data moves our negative-exponent model onto the
    # positive-exponent block algebra used below
    yr = y.real
    yc = -y.imag

    l = centered_indices(n)
    phases = 2.0 * np.pi * np.outer(freq.u, l) / n
    scale = 1.0 / np.sqrt(m)
    c_full = np.cos(phases) * scale
    s_full = np.sin(phases) * scale

    mid_r = m // 2
    mid_c = n // 2
    k_r = mid_r          # number of row pairs
    j_c = mid_c          # number of column pairs
    rows_m = mid_r + 1 + np.arange(k_r)       # q_k, k = 1..K
    rows_p = mid_r - 1 - np.arange(k_r)       # p_k
    cols = mid_c + 1 + np.arange(j_c)         # l = 1..(N-1)/2

    scale_y = max(1.0, float(np.abs(y).max()))
    a_vec = yr - yr[mid_r]
    b_m1 = yc[rows_p]
    b_p1 = -yc[rows_m]
    a_m1 = a_vec[rows_p]
    a_p1 = a_vec[rows_m]

    adiff = a_p1 - a_m1
    bdiff = b_p1 - b_m1
    if np.abs(bdiff).min() < tiny * scale_y:
        raise DegenerateMeasurements(
            "a paired imaginary-part difference vanished (even signal part "
            "missing from the data or cancelling perturbations)")
    if np.abs(adiff).max() < tiny * scale_y:
        raise DegenerateMeasurements(
            "all paired real-part differences vanished (odd signal part "
            "missing from the data)")

    c1 = c_full[np.ix_(rows_m, cols)]
    s1 = s_full[np.ix_(rows_m, cols)]
    c_r1 = 2.0 * (c1 - scale)        # middle row of C is constant 1/sqrt(M)
    s_r1 = 2.0 * s1
    c_c1 = 2.0 * c1
    s_c1 = 2.0 * s1
    x1 = 2.0 * np.pi * (1 + np.arange(j_c)) / n

    z = adiff / bdiff
    h = np.block([
        [c_r1, z[:, None] * s_c1],
        [s_r1 * x1[None, :], -(z[:, None] * c_c1) * x1[None, :]],
    ])
    g = np.concatenate([a_m1 - z * b_m1, np.zeros(k_r)])

    h_cond = float(np.linalg.cond(h))
    if not np.isfinite(h_cond) or h_cond > 1e14:
        raise SingularH(f"block system is numerically singular (cond={h_cond:.3g})")
    w = np.linalg.solve(h, g)
    e1 = w[:j_c]
    o1 = w[j_c:]

    e0 = (yr[mid_r] - 2.0 * scale * e1.sum()) / scale
    x_hat = np.empty(n)
    x_hat[mid_c] = e0
    x_hat[cols] = e1 + o1
    x_hat[mid_c - 1 - np.arange(j_c)] = e1 - o1

    # delta from the imaginary-part equation, row by row
    x_diag = 2.0 * np.pi * l / n
    denom = (c_full * x_diag[None, :]) @ x_hat
    numer = yc - s_full @ x_hat
    reliable = np.abs(denom) >= tiny * max(1.0, float(np.abs(x_hat).max()))
    delta = np.zeros(m)
    delta[reliable] = numer[reliable] / denom[reliable]

    return LinearizedSolution(x_hat=x_hat, delta_hat=delta, e0=float(e0),
                              e1=e1, o1=o1, h_condition=h_cond,
                              delta_reliable=reliable)


def _basis_pursuit_real(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """min ||x||_1 subject to a x = b (split-variable linear program)."""
    n = a.shape[1]
    res = scipy.optimize.linprog(
        c=np.ones(2 * n),
        A_eq=np.hstack([a, -a]),
        b_eq=b,
        bounds=(0, None),
        method="highs",
    )
    if not res.success:
        raise SingularH(f"reduced-system recovery failed: {res.message}")
    return res.x[:n] - res.x[n:]


def solve_linearized_compressive(y: np.ndarray, freq: FrequencySet, n: int,
                                 solver_cfg: SolverConfig,
                                 tiny: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Sparse recovery under the linear model for M <= N via the reduced
    pair-eliminated system.

    The anti-symmetric frequency pairing eliminates the perturbations from
    the measurement equations exactly (the same elimination that yields the
    square block system at M = N), leaving a real linear system in ``x``
    alone.  Since the linear-model data are noiseless by construction, the
    data-fit term of the sparse objective is driven to its zero-residual
    limit, i.e. minimum-l1 recovery subject to the reduced equations,
    solved as a linear program; ``delta`` then follows row by row.  Pairs
    whose elimination ratio is undefined (perturbation terms cancel, e.g.
    delta = 0 data) contribute their unperturbed-row equations instead.
    Returns (x_hat, delta_hat).  ``solver_cfg`` carries the shared
    tolerance conventions; its ``lam`` is irrelevant in the zero-residual
    limit.
    """
    y = np.asarray(y, dtype=complex)
    if freq.is_2d:
        raise ValueError("linearized model is 1D")
    m = freq.M
    if m > n:
        raise ValueError("requires M <= N")
    _check_antisymmetric(freq.u)

    yr = y.real
    yc = -y.imag
    l = centered_indices(n)
    x_diag = 2.0 * np.pi * l / n
    phases = 2.0 * np.pi * np.outer(freq.u, l) / n
    scale = 1.0 / np.sqrt(m)
    c_full = np.cos(phases) * scale
    s_full = np.sin(phases) * scale

    k = m // 2
    rows_p = np.arange(k)
    rows_q = m - 1 - rows_p
    cq = c_full[rows_q]
    sq = s_full[rows_q]
    cqx = cq * x_diag[None, :]
    sqx = sq * x_diag[None, :]

    rdiff = yr[rows_q] - yr[rows_p]            # -(dq+dp) * SqX x
    csum = yc[rows_q] + yc[rows_p]             # (dq+dp) * CqX x
    nondeg = np.abs(csum) > tiny * max(1.0, float(np.abs(y).max()))

    rows = []
    rhs = []
    z = np.zeros(k)
    z[nondeg] = -rdiff[nondeg] / csum[nondeg]
    for i in range(k):
        if nondeg[i]:
            rows.append(sqx[i] - z[i] * cqx[i])
            rhs.append(0.0)
            rows.append(cq[i] + z[i] * sq[i])
            rhs.append(yr[rows_p[i]] - z[i] * yc[rows_p[i]])
        else:
            # perturbation terms cancelled; rows act unperturbed
            rows.append(cq[i])
            rhs.append(0.5 * (yr[rows_p[i]] + yr[rows_q[i]]))
            rows.append(sq[i])
            rhs.append(0.5 * (yc[rows_q[i]] - yc[rows_p[i]]))
    if m % 2 == 1:
        mid = m // 2
        rows.append(c_full[mid])
        rhs.append(yr[mid])

    a = np.asarray(rows)
    b = np.asarray(rhs)
    x_hat = _basis_pursuit_real(a, b)

    delta = np.zeros(m)
    den = cqx @ x_hat
    sqx_term = sq @ x_hat
    ok = np.abs(den) > tiny * max(1.0, float(np.abs(x_hat).max(initial=0.0)))
    sel = nondeg & ok
    delta[rows_p[sel]] = (yc[rows_p[sel]] + sqx_term[sel]) / den[sel]
    delta[rows_q[sel]] = (yc[rows_q[sel]] - sqx_term[sel]) / den[sel]
    if m % 2 == 1:
        mid = m // 2
        dmid = (c_full[mid] * x_diag) @ x_hat
        if abs(dmid) > tiny * max(1.0, float(np.abs(x_hat).max(initial=0.0))):
            delta[mid] = yc[mid] / dmid
    return x_hat, delta
