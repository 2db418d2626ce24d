"""Kernel smoothing of regression residuals and bandwidth selection.

The smoother is the kernel-weighted average of the parametric residuals at
every sample point, own observation included:

    m_hat(X_t) = sum_s e_s K_h(X_t - X_s) / sum_s K_h(X_t - X_s)

with a product kernel across regressor columns. A single scalar bandwidth
is used; for several regressors each column's distances are standardized
by its sample standard deviation and rescaled by the geometric mean of
those standard deviations, so `h` stays in the units of the data and the
composition of rule-of-thumb selection with fitting is invariant to
rescaling any one column. With one regressor the coordinates are used
untouched.

Bandwidth rules: `fixed:<h>` uses h as given, `rot:<omega>` sets
h = S * n**(-omega) with S the (geometric mean) sample standard deviation,
and `cv:<c1>,<c2>,<grid>` minimizes the leave-one-out squared prediction
error over a linear grid of multiples of n**(-1/(p+4)).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import _backend
from .exceptions import DataFormatError, DegenerateSampleError
from .kernels import KERNEL_IDS, KernelSpec

__all__ = [
    "Sample",
    "Bandwidth",
    "BandwidthRule",
    "SmoothFit",
    "parse_ratio",
    "parse_bandwidth",
    "nw_fit",
    "rot_bandwidth",
    "cv_bandwidth",
    "resolve_bandwidth",
]


@dataclass(frozen=True, eq=False)
class Sample:
    """A regression sample: response `y` (length n) and regressors `x` (n, p)."""

    y: np.ndarray
    x: np.ndarray

    def __post_init__(self) -> None:
        y = np.ascontiguousarray(self.y, dtype=np.float64)
        x = np.ascontiguousarray(self.x, dtype=np.float64)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)
        if y.ndim != 1 or x.ndim != 2 or x.shape[0] != y.shape[0]:
            raise DataFormatError("y must be a vector and x a matrix with matching rows")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x))):
            raise DataFormatError("sample contains non-finite values")
        if self.p not in (1, 2, 3):
            raise DataFormatError(
                f"{x.shape[1]} regressor columns given; at most 3 are supported (p < 4)"
            )
        if self.n < 2 * (self.p + 1):
            raise DataFormatError(
                f"need at least {2 * (self.p + 1)} observations for p = {self.p}, got {self.n}"
            )

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class Bandwidth:
    """A resolved bandwidth and the rule that produced it."""

    h: float
    rule: str
    omega: Optional[float] = None

    def __post_init__(self) -> None:
        if not (np.isfinite(self.h) and self.h > 0):
            raise DataFormatError("bandwidth must be a positive finite real")


@dataclass(frozen=True)
class BandwidthRule:
    """Parsed but not yet data-resolved bandwidth selection rule."""

    kind: str
    h: Optional[float] = None
    omega: Optional[float] = None
    c1: float = 0.5
    c2: float = 2.0
    grid: int = 20

    def label(self) -> str:
        if self.kind == "fixed":
            return f"fixed:{self.h:g}"
        if self.kind == "rot":
            return f"rot:{self.omega:g}"
        return f"cv:{self.c1:g},{self.c2:g},{self.grid}"


def parse_ratio(text: str) -> float:
    """Parse a real number written as a decimal or a fraction like 2/9."""
    body = text.strip()
    try:
        if "/" in body:
            return float(Fraction(body))
        return float(body)
    except (ValueError, ZeroDivisionError) as exc:
        raise DataFormatError(f"bad number {text!r}: {exc}") from None


def parse_bandwidth(text: str) -> BandwidthRule:
    """Parse the bandwidth grammar: fixed:<h> | rot:<omega> | cv:<c1>,<c2>,<grid>."""
    body = text.strip().lower()
    try:
        if body.startswith("fixed:"):
            h = parse_ratio(body[6:])
            if h <= 0:
                raise ValueError("fixed bandwidth must be positive")
            return BandwidthRule("fixed", h=h)
        if body.startswith("rot:"):
            omega = parse_ratio(body[4:])
            if not 0.0 < omega < 0.5:
                raise ValueError("rot rate must lie in (0, 0.5)")
            return BandwidthRule("rot", omega=omega)
        if body.startswith("cv:"):
            parts = body[3:].split(",")
            if len(parts) != 3:
                raise ValueError("cv needs three parameters")
            c1, c2 = parse_ratio(parts[0]), parse_ratio(parts[1])
            grid = int(parts[2])
            if not 0.0 < c1 < c2:
                raise ValueError("cv multipliers must satisfy 0 < c1 < c2")
            if grid < 2:
                raise ValueError("cv grid needs at least 2 points")
            return BandwidthRule("cv", c1=c1, c2=c2, grid=grid)
    except (ValueError, DataFormatError) as exc:
        raise DataFormatError(f"bad bandwidth {text!r}: {exc}") from None
    raise DataFormatError(
        f"bad bandwidth {text!r}; expected fixed:<h>, rot:<omega>, or cv:<c1>,<c2>,<grid>"
    )


@dataclass(frozen=True, eq=False)
class SmoothFit:
    """Smoothed residuals and the nonparametric sum of squares."""

    m_hat: np.ndarray
    ssr1: float
    h: float

    @property
    def sigma2_hat(self) -> float:
        return self.ssr1 / self.m_hat.shape[0]


def _column_sds(x: np.ndarray) -> np.ndarray:
    sds = x.std(axis=0, ddof=1)
    if np.any(sds <= 0.0):
        bad = int(np.flatnonzero(sds <= 0.0)[0]) + 1
        raise DegenerateSampleError(f"regressor column {bad} has zero sample variance")
    return sds


def scaled_coords(x: np.ndarray) -> np.ndarray:
    """Coordinates the scalar bandwidth applies to: untouched for p = 1,
    per-column standardized to the geometric-mean scale for p > 1."""
    if x.shape[1] == 1:
        return x
    sds = _column_sds(x)
    geo = float(np.exp(np.mean(np.log(sds))))
    return np.ascontiguousarray(x * (geo / sds))


def _check_inputs(residuals: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    resid = np.ascontiguousarray(residuals, dtype=np.float64)
    xx = np.ascontiguousarray(x, dtype=np.float64)
    if xx.ndim == 1:
        xx = xx.reshape(-1, 1)
    if resid.ndim != 1 or xx.ndim != 2 or xx.shape[0] != resid.shape[0]:
        raise DataFormatError("residuals must be a vector and x a matrix with matching rows")
    if not (np.all(np.isfinite(resid)) and np.all(np.isfinite(xx))):
        raise DataFormatError("non-finite values in smoothing inputs")
    return resid, xx


def nw_fit(
    residuals: np.ndarray, x: np.ndarray, kernel: KernelSpec, h: float
) -> SmoothFit:
    """Smooth the residuals at every sample point and accumulate SSR1.

    Weights at each point sum to one by construction; because the own
    observation is always included the weight denominator is never zero.
    """
    if not (np.isfinite(h) and h > 0):
        raise DataFormatError("bandwidth must be a positive finite real")
    resid, xx = _check_inputs(residuals, x)
    z = scaled_coords(xx)
    m_hat = _backend.nw_smooth(
        resid, z, float(h), KERNEL_IDS[kernel.family], kernel.support_halfwidth
    )
    diff = resid - m_hat
    return SmoothFit(m_hat=m_hat, ssr1=float(diff @ diff), h=float(h))


def weight_matrix(x: np.ndarray, kernel: KernelSpec, h: float) -> np.ndarray:
    """Row-stochastic smoothing matrix W with m_hat = W @ residuals."""
    if not (np.isfinite(h) and h > 0):
        raise DataFormatError("bandwidth must be a positive finite real")
    xx = np.ascontiguousarray(x, dtype=np.float64)
    if xx.ndim == 1:
        xx = xx.reshape(-1, 1)
    z = scaled_coords(xx)
    return _backend.nw_weight_matrix(
        z, float(h), KERNEL_IDS[kernel.family], kernel.support_halfwidth
    )


def rot_bandwidth(x: np.ndarray, omega: float = 2.0 / 9.0) -> Bandwidth:
    """Rule-of-thumb bandwidth h = S * n**(-omega).

    S is the sample standard deviation of the regressor (geometric mean of
    the column standard deviations when there are several). The rate must
    satisfy 0 < omega < 1/(2p).
    """
    xx = np.asarray(x, dtype=np.float64)
    if xx.ndim == 1:
        xx = xx.reshape(-1, 1)
    n, p = xx.shape
    if not 0.0 < omega < 1.0 / (2.0 * p):
        raise DataFormatError(
            f"rot rate omega must lie in (0, {1.0 / (2.0 * p):g}) for p = {p}"
        )
    sds = _column_sds(xx)
    geo = float(np.exp(np.mean(np.log(sds))))
    return Bandwidth(h=geo * n ** (-omega), rule="rot", omega=omega)


def cv_bandwidth(
    residuals: np.ndarray,
    x: np.ndarray,
    kernel: KernelSpec,
    c1: float = 0.5,
    c2: float = 2.0,
    grid_size: int = 20,
) -> Bandwidth:
    """Leave-one-out bandwidth on a linear grid of multiples of n**(-1/(p+4)).

    Points whose leave-one-out neighborhood is empty predict zero. A grid
    value is degenerate when every neighborhood is empty; if the whole grid
    is degenerate no data-driven choice exists and an error is raised.
    """
    if not (0.0 < c1 < c2):
        raise DataFormatError("cv grid needs 0 < c1 < c2")
    if grid_size < 2:
        raise DataFormatError("cv grid needs at least 2 points")
    resid, xx = _check_inputs(residuals, x)
    n, p = xx.shape
    z = scaled_coords(xx)
    kid = KERNEL_IDS[kernel.family]
    hw = kernel.support_halfwidth
    rate = n ** (-1.0 / (p + 4.0))
    grid = np.linspace(c1 * rate, c2 * rate, grid_size)
    best_h, best_crit = None, np.inf
    for h in grid:
        crit, nonempty = _backend.loo_cv_criterion(resid, z, float(h), kid, hw)
        if nonempty == 0:
            continue
        if crit < best_crit:
            best_h, best_crit = float(h), crit
    if best_h is None:
        raise DegenerateSampleError(
            "every cross-validation grid point leaves all neighborhoods empty; "
            "widen the grid or use a fixed bandwidth"
        )
    return Bandwidth(h=best_h, rule="cv")


def resolve_bandwidth(
    rule: BandwidthRule,
    residuals: np.ndarray,
    x: np.ndarray,
    kernel: KernelSpec,
) -> Bandwidth:
    """Turn a parsed rule into a concrete bandwidth for the given data."""
    if rule.kind == "fixed":
        return Bandwidth(h=float(rule.h), rule="fixed")
    if rule.kind == "rot":
        return rot_bandwidth(x, rule.omega if rule.omega is not None else 2.0 / 9.0)
    if rule.kind == "cv":
        return cv_bandwidth(residuals, x, kernel, rule.c1, rule.c2, rule.grid)
    raise DataFormatError(f"unknown bandwidth rule {rule.kind!r}")
