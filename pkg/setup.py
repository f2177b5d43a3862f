"""Build script for the optional compiled kernels.

The package works without the extension (a numpy fallback is selected at
import time); building it makes the fixed-point iteration and the codec
hot loops considerably faster.  Skip the extension entirely with
DFQ_NO_EXT=1.
"""
import os

from setuptools import setup

extensions = []
if os.getenv("DFQ_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        extensions = cythonize(
            [
                Extension(
                    "dfq._kernels",
                    ["src/dfq/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    except ImportError:
        extensions = []

setup(ext_modules=extensions)
