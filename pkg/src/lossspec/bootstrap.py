"""Conditional bootstrap calibration of the specification statistics.

The procedure holds the regressors fixed and rebuilds the response from
the fitted linear null plus resampled errors:

1. Fit the linear null by least squares and smooth its residuals.
2. Compute the observed statistic; form the nonparametric residuals
   e_t = Y_t - ([1, X_t]' theta0 + m_hat(X_t)), the resampling pool.
3. Draw errors from the centered empirical distribution of the pool
   (conditional mode), or multiply the pool by independent Rademacher
   signs (wild mode), and set Y*_t = [1, X_t]' theta0 + e*_t.
4. Recompute the statistic on (X, Y*), re-estimating the null parameters,
   with the same kernel and the same bandwidth.
5. Repeat b times (default 99).
6. p* is the fraction of replicates strictly exceeding the observed value;
   reject at level alpha when p* < alpha.

Replicate l draws from a stream derived from (seed, l) alone, so results
are bitwise identical however replicates are scheduled. A replicate whose
resample is numerically degenerate (zero residual sum of squares) is
redrawn once from a separate retry stream; a second failure raises.

Because X and h never change across replicates, the smoothing matrix and
the null projection are computed once and every replicate reduces to a few
matrix products.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .exceptions import DataFormatError, DegenerateSampleError
from .kernels import KernelSpec
from .loss import LossSpec, loss_eval
from .rng import Tag, substream
from .smoothing import Bandwidth, BandwidthRule, Sample, resolve_bandwidth, weight_matrix
from .stats import TestSpec, ols_fit, ssr_floor

__all__ = [
    "BootstrapConfig",
    "BootstrapOutcome",
    "conditional_bootstrap",
    "bootstrap_many",
    "bootstrap_reject",
]

MODES = ("conditional", "wild")


@dataclass(frozen=True)
class BootstrapConfig:
    """Everything the bootstrap needs besides the sample itself."""

    kernel: KernelSpec
    bandwidth: BandwidthRule
    statistic: str = "loss_q"
    loss: Optional[LossSpec] = None
    b: int = 99
    mode: str = "conditional"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.b < 1:
            raise DataFormatError("bootstrap replication count b must be at least 1")
        if self.mode not in MODES:
            raise DataFormatError(
                f"unknown bootstrap mode {self.mode!r}; choose from {', '.join(MODES)}"
            )
        # validates the tag/loss pairing and fills the default loss
        spec = TestSpec(self.statistic, self.loss)
        object.__setattr__(self, "loss", spec.loss)


@dataclass(frozen=True, eq=False)
class BootstrapOutcome:
    """Observed statistic, its replicate distribution, and the bootstrap p-value."""

    observed: float
    replicates: np.ndarray
    p_star: float
    h: float


class _Engine:
    """Null projection and smoothing matrix for one (X, kernel, h)."""

    def __init__(self, x: np.ndarray, kernel: KernelSpec, h: float):
        n = x.shape[0]
        design = np.column_stack([np.ones(n), x])
        q, r = np.linalg.qr(design)
        diag = np.abs(np.diag(r))
        if np.any(diag < design.shape[1] * np.finfo(float).eps * max(diag.max(), 1.0)):
            raise DegenerateSampleError(
                "rank-deficient null design; a regressor is constant or collinear"
            )
        self.n = n
        self.q = q
        self.w = weight_matrix(x, kernel, h)

    def ssr_parts(
        self, ys: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """For responses in columns of `ys`: null residuals, their smooth,
        and both sums of squares. Returns (resid, m_hat, ssr0, ssr1)."""
        resid = ys - self.q @ (self.q.T @ ys)
        ssr0 = np.einsum("ij,ij->j", resid, resid)
        m_hat = self.w @ resid
        rough = resid - m_hat
        ssr1 = np.einsum("ij,ij->j", rough, rough)
        return resid, m_hat, ssr0, ssr1


def _needs(tests: Sequence[TestSpec]) -> tuple[bool, bool]:
    need_ssr0 = any(t.method in ("loss_q0", "glr") for t in tests)
    need_ssr1 = any(t.method in ("loss_q", "glr", "f") for t in tests)
    return need_ssr0, need_ssr1


def _degenerate_mask(
    ssr0: np.ndarray,
    ssr1: np.ndarray,
    floor: np.ndarray,
    need_ssr0: bool,
    need_ssr1: bool,
) -> np.ndarray:
    # floor, not 0: a perfectly fit response leaves rounding dust, never an
    # exact zero, and a statistic built on that dust is noise
    bad = np.zeros(ssr0.shape, dtype=bool)
    if need_ssr0:
        bad |= ssr0 <= floor
    if need_ssr1:
        bad |= ssr1 <= floor
    return bad


def _test_values(
    tests: Sequence[TestSpec],
    m_hat: np.ndarray,
    ssr0: np.ndarray,
    ssr1: np.ndarray,
    n: int,
) -> np.ndarray:
    """Statistic values per test (rows) per response column."""
    out = np.empty((len(tests), ssr0.shape[0]))
    for i, test in enumerate(tests):
        if test.method in ("loss_q", "loss_q0"):
            q_hat = np.sum(loss_eval(test.loss, m_hat), axis=0)
            denom = (ssr1 if test.method == "loss_q" else ssr0) / n
            out[i] = q_hat / denom
        elif test.method == "glr":
            out[i] = 0.5 * n * np.log(ssr0 / ssr1)
        else:
            out[i] = (ssr0 - ssr1) / ssr1
    return out


def _draw_errors(
    pool_centered: np.ndarray, pool_raw: np.ndarray, mode: str, rng: np.random.Generator
) -> np.ndarray:
    n = pool_raw.shape[0]
    if mode == "conditional":
        return pool_centered[rng.integers(0, n, n)]
    return pool_raw * (2.0 * rng.integers(0, 2, n) - 1.0)


def bootstrap_many(
    sample: Sample,
    kernel: KernelSpec,
    bandwidth: BandwidthRule,
    tests: Sequence[TestSpec],
    b: int = 99,
    mode: str = "conditional",
    seed: int = 0,
) -> tuple[list[BootstrapOutcome], Bandwidth]:
    """Bootstrap several statistics from one shared set of replicates.

    All statistics are recomputed on the same resampled responses, which
    is both cheaper than separate runs and the natural way to compare
    tests on identical bootstrap randomness. Returns the outcomes aligned
    with `tests` plus the resolved bandwidth.
    """
    if b < 1:
        raise DataFormatError("bootstrap replication count b must be at least 1")
    if mode not in MODES:
        raise DataFormatError(f"unknown bootstrap mode {mode!r}")
    if not tests:
        raise DataFormatError("need at least one test to bootstrap")

    null = ols_fit(sample)
    bw = resolve_bandwidth(bandwidth, null.residuals, sample.x, kernel)
    engine = _Engine(sample.x, kernel, bw.h)
    n = sample.n
    need_ssr0, need_ssr1 = _needs(tests)

    y_col = sample.y.reshape(-1, 1)
    resid_obs, m_obs, ssr0_obs, ssr1_obs = engine.ssr_parts(y_col)
    if _degenerate_mask(ssr0_obs, ssr1_obs, ssr_floor(y_col), need_ssr0, need_ssr1)[0]:
        raise DegenerateSampleError(
            "observed statistic undefined: a residual sum of squares is zero"
        )
    observed = _test_values(tests, m_obs, ssr0_obs, ssr1_obs, n)[:, 0]

    fitted0 = sample.y - resid_obs[:, 0]
    pool_raw = resid_obs[:, 0] - m_obs[:, 0]
    pool_centered = pool_raw - pool_raw.mean()

    errors = np.empty((n, b))
    for l in range(b):
        rng = substream(seed, Tag.BOOTSTRAP, l)
        errors[:, l] = _draw_errors(pool_centered, pool_raw, mode, rng)

    ys_rep = fitted0[:, None] + errors
    _, m_rep, ssr0_rep, ssr1_rep = engine.ssr_parts(ys_rep)
    bad = _degenerate_mask(ssr0_rep, ssr1_rep, ssr_floor(ys_rep), need_ssr0, need_ssr1)
    if np.any(bad):
        for l in np.flatnonzero(bad):
            rng = substream(seed, Tag.BOOTSTRAP_RETRY, int(l))
            errors[:, l] = _draw_errors(pool_centered, pool_raw, mode, rng)
        ys_rep = fitted0[:, None] + errors
        _, m_rep, ssr0_rep, ssr1_rep = engine.ssr_parts(ys_rep)
        still_bad = _degenerate_mask(
            ssr0_rep, ssr1_rep, ssr_floor(ys_rep), need_ssr0, need_ssr1
        )
        if np.any(still_bad):
            raise DegenerateSampleError(
                f"bootstrap replicate {int(np.flatnonzero(still_bad)[0])} remained "
                "degenerate after one redraw"
            )
    values = _test_values(tests, m_rep, ssr0_rep, ssr1_rep, n)

    outcomes = []
    for i in range(len(tests)):
        reps = values[i]
        p_star = float(np.count_nonzero(observed[i] < reps)) / b
        outcomes.append(
            BootstrapOutcome(
                observed=float(observed[i]), replicates=reps, p_star=p_star, h=bw.h
            )
        )
    return outcomes, bw


def conditional_bootstrap(sample: Sample, config: BootstrapConfig) -> BootstrapOutcome:
    """Bootstrap one statistic; see the module docstring for the procedure."""
    outcomes, _ = bootstrap_many(
        sample,
        config.kernel,
        config.bandwidth,
        [TestSpec(config.statistic, config.loss)],
        b=config.b,
        mode=config.mode,
        seed=config.seed,
    )
    return outcomes[0]


def bootstrap_reject(outcome: BootstrapOutcome, alpha: float) -> bool:
    """Reject if and only if p* < alpha."""
    if not 0.0 < alpha < 1.0:
        raise DataFormatError("level alpha must lie in (0, 1)")
    return outcome.p_star < alpha
