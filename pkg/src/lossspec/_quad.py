"""Adaptive Gauss-Legendre quadrature on compact intervals.

Panels are bisected until the refined estimate agrees with the parent
estimate to the panel's share of the tolerance. Integrands must accept a
NumPy vector of abscissae and return a vector of values.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .exceptions import QuadratureError

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(15)
_MAX_DEPTH = 48


def _panel(f: Callable, lo: float, hi: float) -> float:
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    return half * float(np.dot(_WEIGHTS, f(mid + half * _NODES)))


def integrate(
    f: Callable,
    lo: float,
    hi: float,
    tol: float = 1e-10,
    name: str = "integrand",
) -> float:
    """Integrate `f` over [lo, hi] to absolute tolerance `tol`.

    Raises QuadratureError naming `name` if the subdivision budget is
    exhausted before the tolerance is met.
    """
    if not hi > lo:
        raise ValueError("empty integration interval")
    if not tol > 0.0:
        raise ValueError("tolerance must be positive")

    def refine(lo: float, hi: float, parent: float, tol: float, depth: int) -> float:
        mid = 0.5 * (lo + hi)
        left = _panel(f, lo, mid)
        right = _panel(f, mid, hi)
        if abs(left + right - parent) <= tol:
            return left + right
        if depth >= _MAX_DEPTH:
            raise QuadratureError(
                f"quadrature did not converge for {name} on "
                f"[{lo:.6g}, {hi:.6g}] within the subdivision budget"
            )
        return refine(lo, mid, left, 0.5 * tol, depth + 1) + refine(
            mid, hi, right, 0.5 * tol, depth + 1
        )

    return refine(lo, hi, _panel(f, lo, hi), tol, 0)
