"""Build script for the optional compiled inner-loop core.

The package is fully functional without the extension (a pure-Python
backend is selected at import time), so a failed native build should
not make the install unusable.  Set GENCURATE_SKIP_NATIVE=1 to skip the
extension entirely.
"""

import os

import numpy as np
from setuptools import setup

ext_modules = []
if not os.environ.get("GENCURATE_SKIP_NATIVE"):
    from Cython.Build import cythonize
    from setuptools import Extension

    # random_standard_uniform / random_standard_normal live in numpy's
    # static distribution library, not in any shared object.
    npyrandom_dir = os.path.join(os.path.dirname(np.random.__file__), "lib")
    ext_modules = cythonize(
        [
            Extension(
                "gencurate._inner._native",
                ["src/gencurate/_inner/_native.pyx"],
                include_dirs=[np.get_include()],
                library_dirs=[npyrandom_dir],
                libraries=["npyrandom"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # -ffp-contract=off: keep float arithmetic step-for-step
                # identical to the pure-Python backend (no FMA fusion).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
