"""Builds the compiled tick kernel; everything else is declarative in pyproject."""

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# No -ffast-math: the compiled kernel must stay bit-identical to the pure
# Python fallback, so only IEEE-strict +,-,*,/,sqrt are allowed.
extensions = [
    Extension(
        "fogsweep._tick_cy",
        ["src/fogsweep/_tick_cy.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": False,  # keep Python float-division semantics
        },
    )
)
