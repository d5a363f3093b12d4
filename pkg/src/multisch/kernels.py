"""Backend selection for the enumeration kernels.

The compiled extension is used when it imports; setting ``MULTISCH_PURE=1``
forces the pure-Python fallback.  ``BACKEND`` names the active one.
"""
from __future__ import annotations

import os

from multisch import _kernels_py as py_backend

c_backend = None
if not os.environ.get("MULTISCH_PURE"):
    try:
        from multisch import _ckernels as c_backend  # type: ignore[no-redef]
    except ImportError:  # pragma: no cover - depends on the build
        c_backend = None

_active = c_backend if c_backend is not None else py_backend
BACKEND = "cython" if c_backend is not None else "python"

contingency_tables = _active.contingency_tables
count_tables = _active.count_tables
transport_compose = _active.transport_compose

__all__ = [
    "BACKEND",
    "contingency_tables",
    "count_tables",
    "transport_compose",
    "py_backend",
    "c_backend",
]
