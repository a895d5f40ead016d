"""Build the optional compiled kernels.

The package works without them: ``piezoqubit._core`` falls back to a
pure-Python implementation when the extension is missing.
"""
import os

from setuptools import setup
from setuptools.extension import Extension

ext_modules = []
if not os.environ.get("PIEZOQUBIT_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        extensions = [
            Extension(
                "piezoqubit._core._rk4",
                ["src/piezoqubit/_core/_rk4.pyx"],
                extra_compile_args=["-O3", "-fno-fast-math"],
                optional=True,
            )
        ]
        ext_modules = cythonize(
            extensions,
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
