"""Build hook for the optional compiled smoothing core.

The package works without the extension: `lossspec._backend` falls back to
the NumPy implementation when `lossspec._core` is missing. The extension is
skipped (with a warning) when Cython or a C compiler is unavailable, so a
source install never hard-fails on the compiled path.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/lossspec/_core.pyx",
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    for ext in ext_modules:
        ext.include_dirs.append(numpy.get_include())
        ext.define_macros.append(("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION"))
except ImportError as exc:  # pragma: no cover - build-environment dependent
    warnings.warn(f"building without the compiled core ({exc})", stacklevel=1)

setup(ext_modules=ext_modules)
