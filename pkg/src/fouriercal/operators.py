"""Nonuniform Fourier measurement operators with frequency perturbations.

The sensing model measures the Fourier transform of a real signal at M
frequencies ``u_i + delta_i`` (base frequency plus an unknown offset bounded
by ``r``).  All operators use the centered spatial index

    l in {-(N-1)/2, ..., (N-1)/2}   for odd N,
    l in {-N/2, ..., N/2 - 1}       for even N,

a negative phase exponent, and a 1/sqrt(M) row normalization, so every
matrix entry has modulus 1/sqrt(M).  Everything here is a pure function of
its inputs; matrices are plain immutable ndarrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Dense evaluation is intentional: problem sizes are capped well below the
# point where a fast NUFFT would pay off.
MAX_DENSE_2D = 4096


def centered_indices(n: int) -> np.ndarray:
    """Centered spatial index grid for a length-``n`` signal."""
    if n < 1:
        raise ValueError("signal length must be >= 1")
    return np.arange(n) - n // 2


def even_odd_parts(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split ``x`` into even/odd parts about the centered index.

    Returns ``(e, o)`` with ``e(l) = e(-l)``, ``o(l) = -o(-l)`` and
    ``e + o == x`` exactly.  For even lengths the unpaired leftmost sample
    (index ``-N/2``) is assigned entirely to the even part.
    """
    x = np.asarray(x, dtype=float)
    xr = x[::-1].copy()
    n = x.shape[0]
    if n % 2 == 0:
        # reversal maps l -> -l only for the paired indices
        xr = np.roll(xr, 1)
        xr[0] = x[0]
    e = 0.5 * (x + xr)
    o = x - e
    return e, o


@dataclass(frozen=True)
class FrequencySet:
    """Base frequencies ``u`` (DFT-bin units), perturbations ``delta``, bound ``r``.

    1D sets store shape ``(M,)`` arrays; 2D sets store shape ``(M, 2)``.
    """

    u: np.ndarray
    delta: np.ndarray
    r: float = 0.0

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        delta = np.asarray(self.delta, dtype=float)
        if u.ndim not in (1, 2) or (u.ndim == 2 and u.shape[1] != 2):
            raise ValueError("u must have shape (M,) or (M, 2)")
        if u.shape[0] < 1:
            raise ValueError("need at least one measurement frequency")
        if delta.shape != u.shape:
            raise ValueError("delta must match the shape of u")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(delta))):
            raise ValueError("frequencies and perturbations must be finite")
        if self.r < 0:
            raise ValueError("perturbation bound r must be >= 0")
        if np.any(np.abs(delta) > self.r + 1e-12):
            raise ValueError("|delta| exceeds the stated bound r")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "delta", delta)

    @property
    def M(self) -> int:
        return self.u.shape[0]

    @property
    def is_2d(self) -> bool:
        return self.u.ndim == 2

    def perturbed(self) -> np.ndarray:
        return self.u + self.delta

    def with_delta(self, delta: np.ndarray) -> "FrequencySet":
        return FrequencySet(self.u, np.asarray(delta, dtype=float), self.r)


@dataclass(frozen=True)
class FourierMatrix:
    """Dense perturbed Fourier matrix plus the column index map."""

    entries: np.ndarray
    index_map: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def build_matrix(freq: FrequencySet, n: int) -> FourierMatrix:
    """Dense M x N matrix with entries ``exp(-2i*pi*(u+delta)*l/N)/sqrt(M)``."""
    if freq.is_2d:
        raise ValueError("build_matrix is 1D; use build_matrix_2d")
    l = centered_indices(n)
    f = freq.perturbed()
    entries = np.exp(-2j * np.pi * np.outer(f, l) / n) / np.sqrt(freq.M)
    return FourierMatrix(entries, l)


def build_matrix_2d(freq2d: FrequencySet, n1: int, n2: int) -> FourierMatrix:
    """Dense M x (N1*N2) matrix over the row-major flattened centered grid."""
    if not freq2d.is_2d:
        raise ValueError("build_matrix_2d needs a 2D frequency set")
    if n1 * n2 > MAX_DENSE_2D:
        raise ValueError(f"dense 2D path capped at {MAX_DENSE_2D} unknowns")
    l1 = centered_indices(n1)
    l2 = centered_indices(n2)
    f = freq2d.perturbed()
    ph1 = np.exp(-2j * np.pi * np.outer(f[:, 0], l1) / n1)
    ph2 = np.exp(-2j * np.pi * np.outer(f[:, 1], l2) / n2)
    entries = (ph1[:, :, None] * ph2[:, None, :]).reshape(freq2d.M, n1 * n2)
    entries /= np.sqrt(freq2d.M)
    grid = np.stack(np.meshgrid(l1, l2, indexing="ij"), axis=-1).reshape(-1, 2)
    return FourierMatrix(entries, grid)


def forward(x: np.ndarray, freq: FrequencySet, chunk: int = 512) -> np.ndarray:
    """Apply the perturbed Fourier operator: ``y = F_t x``.

    Evaluates in row chunks so large M*N never materializes a full matrix.
    """
    x = np.asarray(x)
    n = x.shape[0]
    l = centered_indices(n)
    f = freq.perturbed()
    y = np.empty(freq.M, dtype=complex)
    for lo in range(0, freq.M, chunk):
        hi = min(lo + chunk, freq.M)
        block = np.exp(-2j * np.pi * np.outer(f[lo:hi], l) / n)
        y[lo:hi] = block @ x
    return y / np.sqrt(freq.M)


def adjoint(y: np.ndarray, freq: FrequencySet, n: int, chunk: int = 512) -> np.ndarray:
    """Conjugate-transpose apply: ``F_t^H y`` (length N, complex)."""
    y = np.asarray(y, dtype=complex)
    if y.shape[0] != freq.M:
        raise ValueError("measurement length does not match frequency set")
    l = centered_indices(n)
    f = freq.perturbed()
    out = np.zeros(n, dtype=complex)
    for lo in range(0, freq.M, chunk):
        hi = min(lo + chunk, freq.M)
        block = np.exp(+2j * np.pi * np.outer(l, f[lo:hi]) / n)
        out += block @ y[lo:hi]
    return out / np.sqrt(freq.M)


def derivative_matrix(u: np.ndarray, n: int) -> FourierMatrix:
    """Frequency-derivative operator ``F' = F X`` evaluated at delta = 0.

    ``X`` is the diagonal of ``2*pi*l/N`` over the centered index; the true
    derivative of the perturbed matrix at delta = 0 is ``-i F'`` under the
    negative-exponent phase convention.
    """
    u = np.asarray(u, dtype=float)
    base = build_matrix(FrequencySet(u, np.zeros_like(u)), n)
    x_diag = 2.0 * np.pi * base.index_map / n
    return FourierMatrix(base.entries * x_diag[None, :], base.index_map)


def forward_2d(img: np.ndarray, freq2d: FrequencySet) -> np.ndarray:
    """2D nonuniform transform of a centered-index image (dense, desk scale)."""
    img = np.asarray(img)
    n1, n2 = img.shape
    if n1 * n2 > MAX_DENSE_2D:
        raise ValueError(f"dense 2D path capped at {MAX_DENSE_2D} unknowns")
    if not freq2d.is_2d:
        raise ValueError("forward_2d needs a 2D frequency set")
    l1 = centered_indices(n1)
    l2 = centered_indices(n2)
    f = freq2d.perturbed()
    ph1 = np.exp(-2j * np.pi * np.outer(f[:, 0], l1) / n1)
    ph2 = np.exp(-2j * np.pi * np.outer(f[:, 1], l2) / n2)
    y = np.einsum("ma,ab,mb->m", ph1, img, ph2)
    return y / np.sqrt(freq2d.M)


def adjoint_2d(y: np.ndarray, freq2d: FrequencySet, n1: int, n2: int) -> np.ndarray:
    """Adjoint of :func:`forward_2d`; returns a complex N1 x N2 image."""
    y = np.asarray(y, dtype=complex)
    if y.shape[0] != freq2d.M:
        raise ValueError("measurement length does not match frequency set")
    l1 = centered_indices(n1)
    l2 = centered_indices(n2)
    f = freq2d.perturbed()
    ph1 = np.exp(+2j * np.pi * np.outer(l1, f[:, 0]) / n1)
    ph2 = np.exp(+2j * np.pi * np.outer(l2, f[:, 1]) / n2)
    return np.einsum("am,m,bm->ab", ph1, y, ph2) / np.sqrt(freq2d.M)


def modulation_vector(shift: float, n: int) -> np.ndarray:
    """Per-sample phase ramp ``v(l) = exp(-2i*pi*shift*l/N)``.

    A shared perturbation of every frequency by ``shift`` is equivalent to
    measuring ``x * v`` with the unperturbed operator.
    """
    l = centered_indices(n)
    return np.exp(-2j * np.pi * shift * l / n)
