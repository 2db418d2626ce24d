"""Second-order kernel catalog and the integral constants behind calibration.

Four compactly supported polynomial kernels are provided: uniform,
Epanechnikov, biweight, and triweight. For a kernel K the module computes
the functionals

    a = integral of K^2,
    t = integral of K * (K conv K),
    b = integral of (K conv K)^2,
    c = K(0) - a / 2,
    d = integral of (K - (K conv K) / 2)^2,

where "conv" is self-convolution. These constants drive the centering and
scaling of the asymptotic test calibrations and the efficiency comparisons.
For a p-dimensional product kernel the constants lift as a_p = a^p,
b_p = b^p, t_p = t^p, c_p = K(0)^p - a^p / 2, and d_p = a^p - t^p + b^p / 4.

All integrals are evaluated by adaptive Gauss-Legendre quadrature on the
exact compact supports; the self-convolution has closed forms for the
uniform and Epanechnikov families and is itself quadrature-evaluated for
the others. Results are cached per (family, halfwidth, dimension,
tolerance).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from ._quad import integrate
from .exceptions import DataFormatError

__all__ = [
    "FAMILIES",
    "KernelSpec",
    "KernelConstants",
    "parse_kernel",
    "eval_kernel",
    "eval_product_kernel",
    "self_convolution",
    "kernel_constants",
]

FAMILIES = ("uniform", "epanechnikov", "biweight", "triweight")

# integer codes shared with the compiled smoothing core
KERNEL_IDS = {name: code for code, name in enumerate(FAMILIES)}

ArrayLike = Union[float, np.ndarray]


def _base(family: str, u: np.ndarray) -> np.ndarray:
    """Kernel shape on the reference support [-1, 1]."""
    u = np.abs(u)
    inside = u <= 1.0
    if family == "uniform":
        return np.where(inside, 0.5, 0.0)
    w = np.where(inside, 1.0 - u * u, 0.0)
    if family == "epanechnikov":
        return 0.75 * w
    if family == "biweight":
        return (15.0 / 16.0) * w * w
    if family == "triweight":
        return (35.0 / 32.0) * w * w * w
    raise DataFormatError(f"unknown kernel family {family!r}")


@dataclass(frozen=True)
class KernelSpec:
    """A symmetric density kernel with compact support.

    Attributes
    ----------
    family : str
        One of `FAMILIES`.
    support_halfwidth : float
        Half-width of the support. All built-ins use 1.0; other values
        rescale the kernel as K(u) = base(u / w) / w, preserving total
        mass one.
    """

    family: str
    support_halfwidth: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise DataFormatError(
                f"unknown kernel family {self.family!r}; choose from {', '.join(FAMILIES)}"
            )
        if not (np.isfinite(self.support_halfwidth) and self.support_halfwidth > 0):
            raise DataFormatError("support_halfwidth must be a positive finite real")

    @property
    def peak(self) -> float:
        """K(0), the maximum of the kernel."""
        return float(_base(self.family, np.asarray(0.0))) / self.support_halfwidth


def parse_kernel(text: str) -> KernelSpec:
    """Parse a kernel name from the CLI grammar into a KernelSpec."""
    name = text.strip().lower()
    if name not in FAMILIES:
        raise DataFormatError(
            f"unknown kernel {text!r}; choose from {', '.join(FAMILIES)}"
        )
    return KernelSpec(name)


def eval_kernel(kernel: KernelSpec, u: ArrayLike) -> ArrayLike:
    """Evaluate K(u). Accepts a scalar or an array, returned likewise."""
    w = kernel.support_halfwidth
    arr = np.asarray(u, dtype=float)
    out = _base(kernel.family, arr / w) / w
    if np.isscalar(u) or arr.ndim == 0:
        return float(out)
    return out


def eval_product_kernel(kernel: KernelSpec, u: np.ndarray) -> float:
    """Evaluate the p-dimensional product kernel at a coordinate vector."""
    arr = np.atleast_1d(np.asarray(u, dtype=float))
    if arr.ndim != 1:
        raise ValueError("product kernel expects a 1-D coordinate vector")
    return float(np.prod(eval_kernel(kernel, arr)))


def _conv_base(family: str, s: float, tol: float) -> float:
    """Self-convolution of the reference-support kernel at a scalar point."""
    s = abs(s)
    if s >= 2.0:
        return 0.0
    if family == "uniform":
        return (2.0 - s) / 4.0
    if family == "epanechnikov":
        return (3.0 / 160.0) * (2.0 - s) ** 3 * (s * s + 6.0 * s + 4.0)
    lo, hi = -1.0, 1.0 - s
    return integrate(
        lambda v: _base(family, s + v) * _base(family, v),
        lo,
        hi,
        tol=tol,
        name=f"self-convolution of {family}",
    )


def self_convolution(kernel: KernelSpec, u: ArrayLike, tol: float = 1e-12) -> ArrayLike:
    """Evaluate (K conv K)(u), supported on [-2w, 2w].

    Closed forms are used for the uniform and Epanechnikov families;
    the others fall back on adaptive quadrature at tolerance `tol`.
    """
    w = kernel.support_halfwidth
    arr = np.asarray(u, dtype=float)
    flat = np.atleast_1d(arr / w)
    vals = np.array([_conv_base(kernel.family, s, tol) for s in flat]) / w
    if np.isscalar(u) or arr.ndim == 0:
        return float(vals[0])
    return vals.reshape(arr.shape)


@dataclass(frozen=True)
class KernelConstants:
    """Integral functionals of a (possibly product) kernel.

    For p = 1, `d` is computed by direct quadrature of its defining
    integral, which makes the identity d = a - t + b/4 a genuine
    cross-check rather than a restatement.
    """

    a: float
    b: float
    c: float
    d: float
    t: float
    p: int
    tol: float


# closed forms for the uniform family at halfwidth 1, used as a self-check
_UNIFORM_EXACT = {"a": 0.5, "t": 0.375, "b": 1.0 / 3.0, "d": 5.0 / 24.0}


@lru_cache(maxsize=64)
def _constants_1d(family: str, w: float, tol: float) -> tuple[float, float, float, float]:
    """(a, t, b, d) for one dimension at halfwidth w, by quadrature."""
    conv_tol = max(tol * 1e-3, 1e-14)

    def k(u: np.ndarray) -> np.ndarray:
        return _base(family, u / w) / w

    def conv(u: np.ndarray) -> np.ndarray:
        return np.array([_conv_base(family, s / w, conv_tol) for s in np.atleast_1d(u)]) / w

    # all integrands are even; integrate half-lines and double
    a = 2.0 * integrate(lambda u: k(u) ** 2, 0.0, w, tol=0.5 * tol, name=f"a({family})")
    t = 2.0 * integrate(lambda u: k(u) * conv(u), 0.0, w, tol=0.5 * tol, name=f"t({family})")
    b = 2.0 * (
        integrate(lambda u: conv(u) ** 2, 0.0, w, tol=0.25 * tol, name=f"b({family})")
        + integrate(lambda u: conv(u) ** 2, w, 2.0 * w, tol=0.25 * tol, name=f"b({family})")
    )
    # the integrand of d has a kink where the kernel support ends
    d = 2.0 * (
        integrate(
            lambda u: (k(u) - 0.5 * conv(u)) ** 2,
            0.0,
            w,
            tol=0.25 * tol,
            name=f"d({family})",
        )
        + integrate(
            lambda u: 0.25 * conv(u) ** 2,
            w,
            2.0 * w,
            tol=0.25 * tol,
            name=f"d({family})",
        )
    )

    if family == "uniform":
        for label, got in (("a", a), ("t", t), ("b", b), ("d", d)):
            want = _UNIFORM_EXACT[label] / w
            if abs(got - want) > 10.0 * tol:
                raise RuntimeError(
                    f"uniform-kernel closed form disagrees with quadrature for "
                    f"{label}: {got!r} vs {want!r}"
                )
    return a, t, b, d


def kernel_constants(kernel: KernelSpec, p: int = 1, tol: float = 1e-10) -> KernelConstants:
    """Compute the calibration constants of the p-dimensional product kernel.

    Parameters
    ----------
    kernel : KernelSpec
        The one-dimensional kernel whose product lift is taken.
    p : int
        Number of regressors, 1 to 3.
    tol : float
        Absolute quadrature tolerance for the one-dimensional integrals.
    """
    if p not in (1, 2, 3):
        raise DataFormatError("kernel dimension p must be 1, 2, or 3")
    if not (np.isfinite(tol) and tol > 0):
        raise DataFormatError("quadrature tolerance must be positive")
    a1, t1, b1, d1 = _constants_1d(kernel.family, kernel.support_halfwidth, tol)
    k0 = kernel.peak
    if p == 1:
        return KernelConstants(a=a1, b=b1, c=k0 - 0.5 * a1, d=d1, t=t1, p=1, tol=tol)
    return KernelConstants(
        a=a1**p,
        b=b1**p,
        c=k0**p - 0.5 * a1**p,
        d=a1**p - t1**p + 0.25 * b1**p,
        t=t1**p,
        p=p,
        tol=tol,
    )
