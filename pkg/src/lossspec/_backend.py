"""Runtime selection of the smoothing core.

The compiled extension `lossspec._core` is preferred when importable; the
NumPy implementation `lossspec._core_py` is the fallback. Set the
environment variable LOSSSPEC_BACKEND to "cython" or "python" before import
to force a choice (forcing "cython" raises if the extension is missing).
"""

from __future__ import annotations

import os

_choice = os.environ.get("LOSSSPEC_BACKEND", "").strip().lower()
if _choice not in ("", "cython", "python"):
    raise ImportError(
        f"LOSSSPEC_BACKEND must be 'cython' or 'python', not {_choice!r}"
    )

if _choice == "python":
    from . import _core_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        if _choice == "cython":
            raise
        from . import _core_py as _impl

        BACKEND = "python"

nw_weight_matrix = _impl.nw_weight_matrix
nw_smooth = _impl.nw_smooth
loo_cv_criterion = _impl.loo_cv_criterion

__all__ = ["BACKEND", "nw_weight_matrix", "nw_smooth", "loo_cv_criterion"]
