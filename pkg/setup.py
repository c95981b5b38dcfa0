"""Build script: compiles the optional Cython feature kernel.

The compiled extension is a pure speed-up; if the build toolchain is
missing the package falls back to the numpy kernel at import time.
"""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "faar.kernels._cyfeat",
                ["src/faar/kernels/_cyfeat.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
