"""Simulation data-generating processes.

The regressor is an AR(1) recursion X_t = 0.5 X_{t-1} + v_t with standard
normal innovations, started from zero, burned in for 100 steps, and then
truncated to within two stationary standard deviations
(sigma_X = sqrt(4/3), so |X_t| <= 2.309401). Truncation is implemented as
clipping, which keeps the recursion deterministic; a rejection-resampling
mode is available behind a flag for sensitivity checks.

Error laws are standardized to population mean 0 and variance 1 with exact
constants where the raw law is not already standard: uniform errors use
(U - 1/2) sqrt(12), lognormal errors (L - e^(1/2)) / sqrt((e - 1) e), and
chi-square(1) errors (C - 1) / sqrt(2). Normal errors are standard normal
and Student errors are unscaled t with 5 degrees of freedom.

Models, all with intercept 1 and unit slope in the linear part:

    s_null                 Y = 1 + X + e
    p1_quadratic           Y = 1 + X + theta X^2 + e
    p2_threshold           Y = 1 + X 1(X > 0) + (1 + theta) X 1(X <= 0) + e
    p3_smooth_transition   Y = 1 + X + [1 - theta F(X)] X + e,  F logistic
    local                  Y = 1 + X + n^(-1/2) h^(-p/4) delta(X) + e

Setting theta = 0 collapses every fixed alternative into the linear null
family. The local alternative drifts toward the null at the rate tied to
the bandwidth h = n^(-omega); its shape delta is centered on the sample so
it carries no intercept component, and the built-in shapes are even
functions of X, which keeps delta(X) uncorrelated with X up to symmetry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .exceptions import DataFormatError
from .rng import Tag, substream
from .smoothing import Sample

__all__ = [
    "MODELS",
    "ERROR_DISTS",
    "DELTA_SHAPES",
    "AR_COEFF",
    "SIGMA_X",
    "CLIP_BOUND",
    "BURN_IN",
    "DGPSpec",
    "parse_model",
    "gen_regressor",
    "gen_errors",
    "gen_sample",
]

MODELS = ("s_null", "p1_quadratic", "p2_threshold", "p3_smooth_transition", "local")
ERROR_DISTS = ("normal", "student_t5", "uniform01", "lognormal", "chisq1")
DELTA_SHAPES = ("centered_quadratic", "centered_cosine")
TRUNCATIONS = ("clip", "reject")

_ALIASES = {
    "s": "s_null",
    "null": "s_null",
    "s_null": "s_null",
    "p1": "p1_quadratic",
    "p1_quadratic": "p1_quadratic",
    "p2": "p2_threshold",
    "p2_threshold": "p2_threshold",
    "p3": "p3_smooth_transition",
    "p3_smooth_transition": "p3_smooth_transition",
    "local": "local",
}

AR_COEFF = 0.5
SIGMA_X = math.sqrt(4.0 / 3.0)
CLIP_BOUND = 2.0 * SIGMA_X
BURN_IN = 100


def parse_model(text: str) -> str:
    """Canonicalize a model name; accepts the short aliases s, p1, p2, p3."""
    name = text.strip().lower()
    if name not in _ALIASES:
        raise DataFormatError(
            f"unknown model {text!r}; choose from {', '.join(MODELS)}"
        )
    return _ALIASES[name]


@dataclass(frozen=True)
class DGPSpec:
    """One simulation cell: model, error law, size, seed, and parameters."""

    model: str
    n: int
    seed: int
    error_dist: str = "normal"
    theta: float = 0.0
    delta_shape: str = "centered_quadratic"
    local_omega: float = 2.0 / 9.0
    p_dim: int = 1
    truncation: str = "clip"

    def __post_init__(self) -> None:
        object.__setattr__(self, "model", parse_model(self.model))
        if self.error_dist not in ERROR_DISTS:
            raise DataFormatError(
                f"unknown error law {self.error_dist!r}; choose from {', '.join(ERROR_DISTS)}"
            )
        if self.n < 1:
            raise DataFormatError("sample size must be at least 1")
        if not np.isfinite(self.theta):
            raise DataFormatError("theta must be finite")
        if self.truncation not in TRUNCATIONS:
            raise DataFormatError(f"unknown truncation mode {self.truncation!r}")
        if self.model == "local":
            if self.delta_shape not in DELTA_SHAPES:
                raise DataFormatError(
                    f"unknown local shape {self.delta_shape!r}; "
                    f"choose from {', '.join(DELTA_SHAPES)}"
                )
            if not 0.0 < self.local_omega < 0.5:
                raise DataFormatError("local bandwidth rate must lie in (0, 0.5)")
            if self.p_dim != 1:
                raise DataFormatError(
                    "local alternatives use the scalar AR regressor; p_dim must be 1"
                )


def gen_regressor(n: int, seed: int, truncation: str = "clip") -> np.ndarray:
    """AR(1) regressor, burned in and truncated to [-CLIP_BOUND, CLIP_BOUND]."""
    if n < 1:
        raise DataFormatError("sample size must be at least 1")
    rng = substream(seed, Tag.REGRESSOR)
    if truncation == "clip":
        v = rng.standard_normal(BURN_IN + n)
        x = lfilter([1.0], [1.0, -AR_COEFF], v)
        return np.clip(x[BURN_IN:], -CLIP_BOUND, CLIP_BOUND)
    if truncation == "reject":
        out = np.empty(BURN_IN + n)
        prev = 0.0
        for t in range(BURN_IN + n):
            val = AR_COEFF * prev + rng.standard_normal()
            while abs(val) > CLIP_BOUND:
                val = AR_COEFF * prev + rng.standard_normal()
            out[t] = val
            prev = val
        return out[BURN_IN:]
    raise DataFormatError(f"unknown truncation mode {truncation!r}")


def gen_errors(dist: str, n: int, seed: int) -> np.ndarray:
    """Standardized regression errors from one of the five laws."""
    if n < 1:
        raise DataFormatError("sample size must be at least 1")
    rng = substream(seed, Tag.ERRORS)
    if dist == "normal":
        return rng.standard_normal(n)
    if dist == "student_t5":
        return rng.standard_t(5, n)
    if dist == "uniform01":
        return (rng.random(n) - 0.5) * math.sqrt(12.0)
    if dist == "lognormal":
        return (rng.lognormal(0.0, 1.0, n) - math.exp(0.5)) / math.sqrt(
            (math.e - 1.0) * math.e
        )
    if dist == "chisq1":
        return (rng.chisquare(1.0, n) - 1.0) / math.sqrt(2.0)
    raise DataFormatError(f"unknown error law {dist!r}")


def _delta(shape: str, x: np.ndarray) -> np.ndarray:
    if shape == "centered_quadratic":
        raw = x * x
    else:
        raw = np.cos(np.pi * x)
    return raw - raw.mean()


def gen_sample(spec: DGPSpec) -> Sample:
    """Generate one sample. The regressor and error streams are derived
    from the seed independently, so models sharing a seed share them."""
    x = gen_regressor(spec.n, spec.seed, spec.truncation)
    eps = gen_errors(spec.error_dist, spec.n, spec.seed)
    theta = spec.theta
    if spec.model == "s_null":
        y = 1.0 + x + eps
    elif spec.model == "p1_quadratic":
        y = 1.0 + x + theta * (x * x) + eps
    elif spec.model == "p2_threshold":
        y = 1.0 + np.where(x > 0.0, x, (1.0 + theta) * x) + eps
    elif spec.model == "p3_smooth_transition":
        trans = 1.0 / (1.0 + np.exp(-x))
        y = 1.0 + x + (1.0 - theta * trans) * x + eps
    else:
        h = spec.n ** (-spec.local_omega)
        a_n = spec.n**-0.5 * h ** (-spec.p_dim / 4.0)
        y = 1.0 + x + a_n * _delta(spec.delta_shape, x) + eps
    return Sample(y=y, x=x)
