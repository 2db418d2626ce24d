"""Specification-test statistics and their asymptotic calibrations.

Given a linear null fit with residual sum of squares SSR0 and a kernel
smooth of its residuals with sum of squares SSR1, the statistics are

    q    = sum_t d(m_hat_t) / (SSR1 / n)     loss statistic
    q0   = sum_t d(m_hat_t) / (SSR0 / n)     loss statistic, null variance
    glr  = (n / 2) log(SSR0 / SSR1)          likelihood-ratio statistic
    f    = (SSR0 - SSR1) / SSR1              F-type statistic

Under conditional homoskedasticity the loss and likelihood-ratio
statistics are asymptotically normal after centering and scaling built
from the kernel constants:

    loss:  s = a / (D b),  nu = Omega a^2 / (h^p b),  z = (s q - nu) / sqrt(2 nu)
    glr:   r = c / d,      mu = Omega c^2 / (h^p d),  z = (r glr - mu) / sqrt(2 mu)

where Omega is the volume of the regressor support, estimated by the
product of the per-column sample ranges. Upper-tail p-values follow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import norm

from .exceptions import DataFormatError, DegenerateSampleError
from .kernels import KernelConstants
from .loss import LossSpec, loss_eval, parse_loss, quadratic_loss
from .smoothing import Sample, SmoothFit

__all__ = [
    "NullFit",
    "TestOutcome",
    "TestSpec",
    "METHODS",
    "parse_test",
    "ols_fit",
    "ssr_floor",
    "loss_statistic",
    "glr_statistic",
    "f_statistic",
    "asymptotic_calibration_q",
    "asymptotic_calibration_glr",
    "estimate_omega",
]

METHODS = ("loss_q", "loss_q0", "glr", "f")


@dataclass(frozen=True, eq=False)
class NullFit:
    """Least-squares fit of the linear null model y = [1, x] theta."""

    theta_hat: np.ndarray
    residuals: np.ndarray
    ssr0: float


@dataclass(frozen=True)
class TestOutcome:
    """An asymptotically calibrated test statistic."""

    method: str
    statistic: float
    centering: float
    scaling: float
    z: float
    p_value: float


@dataclass(frozen=True)
class TestSpec:
    """A statistic to compute: the method tag plus the loss it scores with.

    `loss` is required for the loss methods and must be absent for glr/f.
    """

    method: str
    loss: Optional[LossSpec] = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise DataFormatError(
                f"unknown method {self.method!r}; choose from {', '.join(METHODS)}"
            )
        if self.method in ("loss_q", "loss_q0"):
            if self.loss is None:
                object.__setattr__(self, "loss", quadratic_loss())
        elif self.loss is not None:
            raise DataFormatError(f"method {self.method} does not take a loss")

    def label(self) -> str:
        if self.loss is None:
            return self.method
        return f"{self.method}:{self.loss.label()}"


def parse_test(text: str) -> TestSpec:
    """Parse a test descriptor: <method> or <method>:<loss grammar>."""
    body = text.strip()
    if ":" in body:
        method, loss_text = body.split(":", 1)
        return TestSpec(method.strip().lower(), parse_loss(loss_text))
    return TestSpec(body.lower())


def ols_fit(sample: Sample) -> NullFit:
    """Fit the linear null by least squares on the design [1, x]."""
    design = np.column_stack([np.ones(sample.n), sample.x])
    theta, _, rank, _ = np.linalg.lstsq(design, sample.y, rcond=None)
    if rank < design.shape[1]:
        raise DegenerateSampleError(
            "rank-deficient null design; a regressor is constant or collinear"
        )
    residuals = sample.y - design @ theta
    return NullFit(theta_hat=theta, residuals=residuals, ssr0=float(residuals @ residuals))


def ssr_floor(y: np.ndarray) -> np.ndarray:
    """Largest residual sum of squares still indistinguishable from a
    perfect fit. Rounding noise in the null projection grows with the
    sample size and the magnitude of the response, so an SSR at or below
    this floor carries no information about lack of fit."""
    arr = np.asarray(y, dtype=float)
    n = arr.shape[0]
    scale = np.max(np.abs(arr), axis=0)
    return n * (n * np.finfo(float).eps * scale) ** 2


def loss_statistic(
    fit: SmoothFit,
    loss: LossSpec,
    denominator: str = "ssr1",
    ssr0: Optional[float] = None,
) -> tuple[float, float]:
    """Accumulated loss of the smoothed residuals and its studentized form.

    Returns (Q_hat, q) where q = Q_hat / (SSR / n) with SSR chosen by the
    `denominator` tag: "ssr1" for the nonparametric sum of squares, "ssr0"
    for the null sum of squares (which must then be supplied).
    """
    n = fit.m_hat.shape[0]
    q_hat = float(np.sum(loss_eval(loss, fit.m_hat)))
    if denominator == "ssr1":
        denom = fit.ssr1 / n
    elif denominator == "ssr0":
        if ssr0 is None:
            raise DataFormatError("denominator 'ssr0' needs the null SSR")
        denom = ssr0 / n
    else:
        raise DataFormatError(f"unknown denominator tag {denominator!r}")
    if not denom > 0.0:
        raise DegenerateSampleError(
            f"variance estimate from {denominator} is zero; statistic undefined"
        )
    return q_hat, q_hat / denom


def glr_statistic(ssr0: float, ssr1: float, n: int) -> float:
    """Likelihood-ratio statistic (n / 2) log(SSR0 / SSR1)."""
    if not (ssr0 > 0.0 and ssr1 > 0.0):
        raise DegenerateSampleError("glr statistic needs strictly positive SSR0 and SSR1")
    return 0.5 * n * math.log(ssr0 / ssr1)


def f_statistic(ssr0: float, ssr1: float) -> float:
    """F-type statistic (SSR0 - SSR1) / SSR1."""
    if not ssr1 > 0.0:
        raise DegenerateSampleError("f statistic needs strictly positive SSR1")
    return (ssr0 - ssr1) / ssr1


def _check_calibration_inputs(omega_measure: float, h: float) -> None:
    if not (np.isfinite(omega_measure) and omega_measure > 0):
        raise DataFormatError("support measure must be a positive finite real")
    if not (np.isfinite(h) and h > 0):
        raise DataFormatError("bandwidth must be a positive finite real")


def asymptotic_calibration_q(
    q: float,
    constants: KernelConstants,
    curvature: float,
    omega_measure: float,
    h: float,
    method: str = "loss_q",
) -> TestOutcome:
    """Center and scale the loss statistic under the homoskedastic null.

    `curvature` is the loss constant D = d''(0) / 2; the centering does not
    depend on it, only the scaling s = a / (D b) does. The same calibration
    applies to both studentizations of the loss statistic, so `method` is
    only a label carried into the outcome.
    """
    _check_calibration_inputs(omega_measure, h)
    if not curvature > 0.0:
        raise DataFormatError("loss curvature must be positive")
    a, b, p = constants.a, constants.b, constants.p
    s = a / (curvature * b)
    nu = omega_measure * a * a / (h**p * b)
    z = (s * q - nu) / math.sqrt(2.0 * nu)
    return TestOutcome(
        method=method,
        statistic=q,
        centering=nu,
        scaling=s,
        z=z,
        p_value=float(norm.sf(z)),
    )


def asymptotic_calibration_glr(
    glr: float,
    constants: KernelConstants,
    omega_measure: float,
    h: float,
) -> TestOutcome:
    """Center and scale the likelihood-ratio statistic under the null."""
    _check_calibration_inputs(omega_measure, h)
    c, d, p = constants.c, constants.d, constants.p
    r = c / d
    mu = omega_measure * c * c / (h**p * d)
    z = (r * glr - mu) / math.sqrt(2.0 * mu)
    return TestOutcome(
        method="glr",
        statistic=glr,
        centering=mu,
        scaling=r,
        z=z,
        p_value=float(norm.sf(z)),
    )


def estimate_omega(x: np.ndarray) -> float:
    """Estimate the volume of the regressor support by the product of the
    per-column sample ranges."""
    xx = np.asarray(x, dtype=np.float64)
    if xx.ndim == 1:
        xx = xx.reshape(-1, 1)
    ranges = xx.max(axis=0) - xx.min(axis=0)
    if np.any(ranges <= 0.0):
        bad = int(np.flatnonzero(ranges <= 0.0)[0]) + 1
        raise DegenerateSampleError(f"regressor column {bad} has zero range")
    return float(np.prod(ranges))
