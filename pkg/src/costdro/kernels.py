"""Kernel dispatch: the compiled extension when importable, numpy otherwise.

Set ``COSTDRO_PURE_PYTHON=1`` before import to force the numpy path.
"""
import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if os.environ.get("COSTDRO_PURE_PYTHON") != "1":
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py


def _c(x):
    return np.ascontiguousarray(x, dtype=np.float64)


def corner_min(a, Z, X, V, backend=None):
    impl = _kernels_py if backend == "python" else _impl
    return impl.corner_min(_c(a), _c(Z), _c(X), _c(V))


def softmin(a, Z, X, V, tau, backend=None):
    impl = _kernels_py if backend == "python" else _impl
    return impl.softmin(_c(a), _c(Z), _c(X), _c(V), float(tau))


def available_backends():
    out = ["python"]
    if _impl is not _kernels_py:
        out.append("cython")
    return out
