"""NumPy implementation of the smoothing core.

Mirrors the compiled extension `_core` function for function. Kept pure so
the package works on interpreters without a C toolchain; the compiled core
is preferred at import time when present.
"""

from __future__ import annotations

import numpy as np


def _kernel_values(u: np.ndarray, kernel_id: int) -> np.ndarray:
    """Reference-support kernel shape at absolute scaled distances."""
    if kernel_id == 0:
        return np.where(u <= 1.0, 0.5, 0.0)
    w = 1.0 - u * u
    np.clip(w, 0.0, None, out=w)
    if kernel_id == 1:
        return 0.75 * w
    if kernel_id == 2:
        return 0.9375 * w * w
    if kernel_id == 3:
        return 1.09375 * w * w * w
    raise ValueError(f"unknown kernel id {kernel_id}")


def _raw_weights(z: np.ndarray, h: float, kernel_id: int, halfwidth: float) -> np.ndarray:
    z = np.ascontiguousarray(z, dtype=np.float64)
    u = np.abs(z[:, None, :] - z[None, :, :]) / (h * halfwidth)
    k = _kernel_values(u, kernel_id) / halfwidth
    return k.prod(axis=2)


def nw_weight_matrix(z: np.ndarray, h: float, kernel_id: int, halfwidth: float) -> np.ndarray:
    """Row-stochastic kernel weight matrix over the sample points."""
    raw = _raw_weights(z, h, kernel_id, halfwidth)
    return raw / raw.sum(axis=1, keepdims=True)


def nw_smooth(
    resid: np.ndarray, z: np.ndarray, h: float, kernel_id: int, halfwidth: float
) -> np.ndarray:
    """Kernel-weighted average of `resid` at every sample point."""
    raw = _raw_weights(z, h, kernel_id, halfwidth)
    return (raw @ resid) / raw.sum(axis=1)


def loo_cv_criterion(
    resid: np.ndarray, z: np.ndarray, h: float, kernel_id: int, halfwidth: float
) -> tuple[float, int]:
    """Leave-one-out squared prediction error and the count of points with
    a nonempty leave-one-out neighborhood. Empty neighborhoods predict 0."""
    raw = _raw_weights(z, h, kernel_id, halfwidth)
    np.fill_diagonal(raw, 0.0)
    den = raw.sum(axis=1)
    num = raw @ resid
    pred = np.divide(num, den, out=np.zeros_like(num), where=den > 0.0)
    crit = float(((resid - pred) ** 2).sum())
    return crit, int(np.count_nonzero(den > 0.0))
