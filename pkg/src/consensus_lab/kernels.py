"""Kernel backend selection.

Prefers the compiled extension; falls back to the pure-Python kernels when
it is not built. ``CONSENSUS_LAB_BACKEND=c|python`` forces a choice (used
by the equivalence tests and the benchmark).
"""

from __future__ import annotations

import os

from . import _kernels_py

_forced = os.environ.get("CONSENSUS_LAB_BACKEND", "").strip().lower()

if _forced == "python":
    impl = _kernels_py
    BACKEND = "python"
elif _forced == "c":
    from . import _kernels_c as impl  # hard import error if forced but missing
    BACKEND = "c"
else:
    try:
        from . import _kernels_c as impl
        BACKEND = "c"
    except ImportError:
        impl = _kernels_py
        BACKEND = "python"

INIT_UNIFORM = _kernels_py.INIT_UNIFORM
INIT_NONEMPTY = _kernels_py.INIT_NONEMPTY
INIT_FIXED = _kernels_py.INIT_FIXED
COUPLING_SINGLE = _kernels_py.COUPLING_SINGLE
COUPLING_INDEPENDENT = _kernels_py.COUPLING_INDEPENDENT
COUPLING_BUNDLED = _kernels_py.COUPLING_BUNDLED


def available_backends():
    """Names of importable backends (always includes 'python')."""
    names = ["python"]
    try:
        from . import _kernels_c  # noqa: F401
        names.insert(0, "c")
    except ImportError:
        pass
    return names


def backend_module(name):
    if name == "python":
        return _kernels_py
    if name == "c":
        from . import _kernels_c
        return _kernels_c
    raise ValueError(f"unknown backend {name!r}")
