"""Floating-point rank, kept only for comparison against the exact kernel."""
from __future__ import annotations

import numpy as np

from .linalg import RationalMatrix

__all__ = ["to_array", "default_tolerance", "float_rank"]


def to_array(M: RationalMatrix) -> np.ndarray:
    return np.array([float(x) for x in M.entries], dtype=float).reshape(M.rows, M.cols)


def default_tolerance(sigma: np.ndarray, shape: tuple[int, int]) -> float:
    """max(rows, cols) * eps * largest singular value."""
    if sigma.size == 0:
        return 0.0
    return max(shape) * np.finfo(float).eps * float(sigma[0])


def float_rank(M: RationalMatrix, tol: float | None = None, rtol: float | None = None) -> int:
    """Count of singular values above a threshold.

    ``tol`` fixes an absolute threshold; ``rtol`` replaces the
    max(rows, cols) * eps factor. With neither, the default policy applies.
    """
    if M.rows == 0 or M.cols == 0:
        return 0
    sigma = np.linalg.svd(to_array(M), compute_uv=False)
    if tol is None:
        tol = rtol * float(sigma[0]) if rtol is not None else default_tolerance(sigma, M.shape)
    return int(np.count_nonzero(sigma > tol))
