"""Build script for the optional compiled kernels.

The package works without a C compiler: ``costdro.kernels`` falls back to the
numpy implementation when the extension is missing.
"""
import os

import numpy as np
from setuptools import setup

ext_modules = []
if os.environ.get("COSTDRO_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:  # pragma: no cover
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "costdro._ckernels",
                    ["src/costdro/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False, "cdivision": True},
        )

setup(ext_modules=ext_modules)
