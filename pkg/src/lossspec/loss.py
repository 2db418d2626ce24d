"""Loss families for residual-based specification statistics.

A loss d(z) scores the smoothed parametric residual at each sample point.
Admissible losses vanish at the origin, are flat there to first order,
have positive curvature at zero, and never decrease as |z| grows. The
curvature constant D = d''(0)/2 is what the asymptotic calibration needs.

Three families are built in:

    quadratic             d(z) = z^2
    truncated_quadratic   d(z) = z^2 / 2 for |z| <= c, else c|z| - c^2 / 2
    linex                 d(z) = (beta / alpha^2) (exp(alpha z) - 1 - alpha z)

The linex family is asymmetric for alpha != 0 and collapses to the
quadratic-type limit beta z^2 / 2 as alpha -> 0. Near alpha z = 0 the
closed form loses precision to cancellation, so a short series expansion
takes over on |alpha z| < 1e-4.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .exceptions import DataFormatError

__all__ = [
    "LossSpec",
    "LossValidation",
    "quadratic_loss",
    "truncated_quadratic_loss",
    "linex_loss",
    "parse_loss",
    "loss_eval",
    "loss_curvature",
    "validate_loss",
]

FAMILIES = ("quadratic", "truncated_quadratic", "linex")

_SERIES_CUTOFF = 1e-4


@dataclass(frozen=True)
class LossSpec:
    """One member of a loss family.

    `c` is the truncated-quadratic knee; `alpha` and `beta` are the linex
    shape and scale. Fields not used by the family are ignored.
    """

    family: str
    c: float = 1.0
    alpha: float = 0.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise DataFormatError(
                f"unknown loss family {self.family!r}; choose from {', '.join(FAMILIES)}"
            )
        if self.family == "truncated_quadratic" and not (
            np.isfinite(self.c) and self.c > 0
        ):
            raise DataFormatError("truncated-quadratic knee c must be a positive real")
        if self.family == "linex":
            if not np.isfinite(self.alpha):
                raise DataFormatError("linex alpha must be finite")
            if not (np.isfinite(self.beta) and self.beta > 0):
                raise DataFormatError("linex beta must be a positive real")

    def label(self) -> str:
        """Compact grammar form, e.g. 'tq:1.0' or 'linex:0.5,1.0'."""
        if self.family == "quadratic":
            return "quadratic"
        if self.family == "truncated_quadratic":
            return f"tq:{self.c:g}"
        return f"linex:{self.alpha:g},{self.beta:g}"


def quadratic_loss() -> LossSpec:
    return LossSpec("quadratic")


def truncated_quadratic_loss(c: float) -> LossSpec:
    return LossSpec("truncated_quadratic", c=float(c))


def linex_loss(alpha: float, beta: float = 1.0) -> LossSpec:
    return LossSpec("linex", alpha=float(alpha), beta=float(beta))


def parse_loss(text: str) -> LossSpec:
    """Parse the loss grammar: quadratic | tq:<c> | linex:<alpha>,<beta>."""
    body = text.strip().lower()
    try:
        if body == "quadratic":
            return quadratic_loss()
        if body.startswith("tq:"):
            return truncated_quadratic_loss(float(body[3:]))
        if body.startswith("linex:"):
            parts = body[6:].split(",")
            if len(parts) != 2:
                raise ValueError("linex needs two parameters")
            return linex_loss(float(parts[0]), float(parts[1]))
    except (ValueError, DataFormatError) as exc:
        raise DataFormatError(f"bad loss {text!r}: {exc}") from None
    raise DataFormatError(
        f"bad loss {text!r}; expected quadratic, tq:<c>, or linex:<alpha>,<beta>"
    )


def _linex_values(alpha: float, beta: float, z: np.ndarray) -> np.ndarray:
    x = alpha * z
    series = 0.5 * beta * z * z * (1.0 + x / 3.0 + x * x / 12.0)
    if alpha == 0.0:
        return series
    # beta z^2 (expm1(x) - x) / x^2 == (beta / alpha^2)(e^x - 1 - x) but stays
    # finite when alpha^2 underflows; the x ~ 0 entries take the series anyway.
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        exact = beta * z * z * (np.expm1(x) - x) / (x * x)
        out = np.where(np.abs(x) < _SERIES_CUTOFF, series, exact)
    if np.any(np.isinf(out)):
        warnings.warn(
            "linex loss saturated to infinity for some arguments", RuntimeWarning
        )
    return out


def loss_eval(loss: LossSpec, z: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Evaluate the loss pointwise. Accepts a scalar or array, returned likewise."""
    arr = np.asarray(z, dtype=float)
    if loss.family == "quadratic":
        out = arr * arr
    elif loss.family == "truncated_quadratic":
        az = np.abs(arr)
        out = np.where(az <= loss.c, 0.5 * arr * arr, loss.c * az - 0.5 * loss.c**2)
    else:
        out = _linex_values(loss.alpha, loss.beta, arr)
    if np.isscalar(z) or arr.ndim == 0:
        return float(out)
    return out


def loss_curvature(loss: LossSpec) -> float:
    """Curvature constant D = d''(0) / 2."""
    if loss.family == "quadratic":
        return 1.0
    if loss.family == "truncated_quadratic":
        return 0.5
    return 0.5 * loss.beta


@dataclass(frozen=True)
class LossValidation:
    """Admissibility report from `validate_loss`."""

    zero_at_origin: bool
    flat_at_origin: bool
    convex_at_origin: bool
    nondecreasing: bool
    details: dict = field(default_factory=dict, compare=False)

    @property
    def passed(self) -> bool:
        return (
            self.zero_at_origin
            and self.flat_at_origin
            and self.convex_at_origin
            and self.nondecreasing
        )


def validate_loss(
    loss: LossSpec, grid_max: float = 3.0, grid_size: int = 61
) -> LossValidation:
    """Check the admissibility conditions by finite differences and a grid.

    The derivative checks use a central step of 1e-5; monotonicity is
    checked along |z| on a symmetric grid out to `grid_max`.
    """
    step = 1e-5
    at0 = float(loss_eval(loss, 0.0))
    up = float(loss_eval(loss, step))
    dn = float(loss_eval(loss, -step))
    slope = (up - dn) / (2.0 * step)
    curvature = (up - 2.0 * at0 + dn) / (step * step)

    zs = np.linspace(0.0, grid_max, grid_size)
    pos = np.asarray(loss_eval(loss, zs))
    neg = np.asarray(loss_eval(loss, -zs))
    nondecreasing = bool(
        np.all(np.diff(pos) >= -1e-12)
        and np.all(np.diff(neg) >= -1e-12)
        and np.all(pos >= 0.0)
        and np.all(neg >= 0.0)
    )
    return LossValidation(
        zero_at_origin=at0 == 0.0,
        flat_at_origin=abs(slope) <= 1e-8,
        convex_at_origin=curvature > 0.0,
        nondecreasing=nondecreasing,
        details={"origin_slope": slope, "origin_curvature": curvature},
    )
