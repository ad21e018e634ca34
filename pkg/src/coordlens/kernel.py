"""Evaluation kernel selection.

The compiled kernel is used when it was built; set ``COORDLENS_KERNEL=python``
to force the pure-Python one.
"""
from __future__ import annotations

import os

from . import _pykernel

PyKernel = _pykernel.Kernel

try:
    from . import _ckernel
    CKernel = _ckernel.Kernel
except ImportError:  # extension not built
    _ckernel = None
    CKernel = None

if os.environ.get("COORDLENS_KERNEL", "").lower() == "python" or CKernel is None:
    Kernel = PyKernel
    BACKEND = "python"
else:
    Kernel = CKernel
    BACKEND = "cython"


def available_backends() -> dict[str, type]:
    out = {"python": PyKernel}
    if CKernel is not None:
        out["cython"] = CKernel
    return out
