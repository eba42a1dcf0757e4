"""Orthonormal sparsifying bases: canonical, 1D Haar, 2D separable Haar.

A basis maps coefficient vectors to signals (synthesis) and back
(analysis).  All three kinds are orthonormal, so analysis is the transpose
of synthesis and both preserve the l2 norm.  Haar kinds use the 1/sqrt(2)
filter pair at full decomposition depth and require dyadic lengths;
coefficients are ordered ``[approx, coarsest detail, ..., finest detail]``.
"""

from __future__ import annotations

import numpy as np


def _is_dyadic(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _haar_analyze_last(x: np.ndarray) -> np.ndarray:
    """Full-depth orthonormal Haar analysis along the last axis (batched)."""
    out = np.array(x, copy=True)
    n = out.shape[-1]
    while n > 1:
        a = out[..., 0:n:2]
        b = out[..., 1:n:2]
        approx = (a + b) / np.sqrt(2.0)
        detail = (a - b) / np.sqrt(2.0)
        out[..., : n // 2] = approx
        out[..., n // 2 : n] = detail
        n //= 2
    return out


def _haar_synthesize_last(theta: np.ndarray) -> np.ndarray:
    """Inverse of :func:`_haar_analyze_last` (batched along leading axes)."""
    out = np.array(theta, copy=True)
    n = 1
    total = out.shape[-1]
    while n < total:
        approx = out[..., :n].copy()
        detail = out[..., n : 2 * n].copy()
        out[..., : 2 * n : 2] = (approx + detail) / np.sqrt(2.0)
        out[..., 1 : 2 * n : 2] = (approx - detail) / np.sqrt(2.0)
        n *= 2
    return out


def _haar_analyze_1d(x: np.ndarray) -> np.ndarray:
    return _haar_analyze_last(np.asarray(x, dtype=float))


def _haar_synthesize_1d(theta: np.ndarray) -> np.ndarray:
    return _haar_synthesize_last(np.asarray(theta, dtype=float))


class SparsityBasis:
    """Orthonormal basis ``Psi`` with synthesis ``x = Psi @ theta``.

    Parameters
    ----------
    kind : {"canonical", "haar1d", "haar2d"}
    shape : int or (int, int)
        Signal length, or image shape for the 2D kind.
    """

    KINDS = ("canonical", "haar1d", "haar2d")

    def __init__(self, kind: str, shape):
        if kind not in self.KINDS:
            raise ValueError(f"unknown basis kind {kind!r}")
        self.kind = kind
        if kind == "haar2d":
            n1, n2 = shape
            if not (_is_dyadic(n1) and _is_dyadic(n2)):
                raise ValueError("haar2d requires dyadic image sides")
            self.shape = (int(n1), int(n2))
            self.size = int(n1) * int(n2)
        else:
            n = int(shape) if np.isscalar(shape) else int(shape[0])
            if kind == "haar1d" and not _is_dyadic(n):
                raise ValueError("haar1d requires a dyadic length")
            self.shape = (n,)
            self.size = n

    def synthesize(self, theta: np.ndarray) -> np.ndarray:
        """Coefficients -> signal (1D output; 2D images row-major flattened)."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape[0] != self.size:
            raise ValueError("coefficient length does not match basis size")
        if self.kind == "canonical":
            return theta.copy()
        if self.kind == "haar1d":
            return _haar_synthesize_1d(theta)
        n1, n2 = self.shape
        img = theta.reshape(n1, n2)
        img = np.apply_along_axis(_haar_synthesize_1d, 0, img)
        img = np.apply_along_axis(_haar_synthesize_1d, 1, img)
        return img.reshape(-1)

    def analyze(self, x: np.ndarray) -> np.ndarray:
        """Signal -> coefficients (inverse of :meth:`synthesize`)."""
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.size:
            raise ValueError("signal length does not match basis size")
        if self.kind == "canonical":
            return x.copy()
        if self.kind == "haar1d":
            return _haar_analyze_1d(x)
        n1, n2 = self.shape
        img = x.reshape(n1, n2)
        img = np.apply_along_axis(_haar_analyze_1d, 1, img)
        img = np.apply_along_axis(_haar_analyze_1d, 0, img)
        return img.reshape(-1)

    def analyze_rows(self, mat: np.ndarray) -> np.ndarray:
        """Apply analysis to every row of a (k, size) matrix at once.

        ``mat @ Psi`` for a dense synthesis matrix Psi equals
        ``analyze_rows(mat)``, which is how sensing matrices are composed
        with the basis without materializing Psi.  Complex input is fine.
        """
        mat = np.asarray(mat)
        if mat.shape[-1] != self.size:
            raise ValueError("row length does not match basis size")
        if self.kind == "canonical":
            return mat.copy()
        if self.kind == "haar1d":
            return _haar_analyze_last(mat)
        n1, n2 = self.shape
        img = mat.reshape(*mat.shape[:-1], n1, n2)
        img = _haar_analyze_last(img)                   # along n2
        img = _haar_analyze_last(img.swapaxes(-1, -2)).swapaxes(-1, -2)
        return img.reshape(*mat.shape[:-1], n1 * n2)

    def matrix(self) -> np.ndarray:
        """Dense synthesis matrix (desk scale only; columns are basis vectors)."""
        return self.analyze_rows(np.eye(self.size))
