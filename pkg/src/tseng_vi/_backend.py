"""Kernel backend selection.

The compiled Cython module is used when it imports; otherwise the numpy
fallback is used. Set ``TSENG_VI_PURE_PYTHON=1`` to force the fallback.
"""

import importlib
import os

from . import _pykernels


def load(name):
    """Return the kernel module for ``name`` ("cython" or "python")."""
    if name == "python":
        return _pykernels
    if name == "cython":
        return importlib.import_module("tseng_vi._kernels")
    raise ValueError(f"unknown backend {name!r}")


def _select():
    if os.environ.get("TSENG_VI_PURE_PYTHON", "") not in ("", "0"):
        return "python", _pykernels
    try:
        return "cython", load("cython")
    except ImportError:
        return "python", _pykernels


BACKEND, kernels = _select()
