"""Numerical kernels with a compiled fast path.

``rk4_propagate`` comes from the Cython extension when it is built and
importable, otherwise from the pure-Python module. Set the environment
variable ``PIEZOQUBIT_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import fallback

BACKEND = "python"
rk4_propagate = fallback.rk4_propagate

if not os.environ.get("PIEZOQUBIT_PURE_PYTHON"):
    try:
        from ._rk4 import rk4_propagate  # noqa: F811
    except ImportError:
        pass
    else:
        BACKEND = "cython"

__all__ = ["BACKEND", "rk4_propagate", "fallback"]
