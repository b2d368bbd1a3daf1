"""Build script: compiles the optional fast kernels.

The package works without the extension (a pure-Python fallback is selected
at import time), so a failed compile downgrades to a warning instead of
aborting the install.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "swroute._kernels._fast",
                ["src/swroute/_kernels/_fast.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-env dependent
    warnings.warn(f"fast kernels not built ({exc}); using pure-Python fallback")

setup(ext_modules=ext_modules)
