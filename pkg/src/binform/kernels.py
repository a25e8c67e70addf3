"""Kernel backend selection.

Two interchangeable backends provide the uint64 marching kernels:

* ``numba``: serial @njit loops (fast, nogil).
* ``numpy``: vectorized iterated cumsum (no compilation dependency).

Both compute sum_j C(t, j) * D_j mod 2^64 exactly, so their outputs are
bit-identical; only speed differs. Selection: the BINFORM_KERNELS environment
variable ("numba" or "numpy"), defaulting to numba when it imports, else
numpy. `use_backend` switches at runtime (used by tests and the benchmark).

Kernel contract (see _kernels_numba for semantics): tables are scratch
arrays -- contents after a call are unspecified.
"""

from __future__ import annotations

import os

from . import _kernels_numpy

_numba_impl = None
_numba_error: Exception | None = None


def _load_numba():
    global _numba_impl, _numba_error
    if _numba_impl is None and _numba_error is None:
        try:
            from . import _kernels_numba
            _numba_impl = _kernels_numba
        except ImportError as err:  # pragma: no cover - environment dependent
            _numba_error = err
    return _numba_impl


def _default_backend() -> str:
    env = os.environ.get("BINFORM_KERNELS", "").strip().lower()
    if env in ("numba", "numpy"):
        return env
    if env:
        raise ValueError(f"BINFORM_KERNELS must be 'numba' or 'numpy', got {env!r}")
    return "numba" if _load_numba() is not None else "numpy"


_backend_name: str | None = None
_impl = None


def use_backend(name: str) -> str:
    """Select the kernel backend ('numba' or 'numpy'). Returns the name set."""
    global _backend_name, _impl
    if name == "numpy":
        _impl = _kernels_numpy
    elif name == "numba":
        impl = _load_numba()
        if impl is None:
            raise ImportError(f"numba backend unavailable: {_numba_error}")
        _impl = impl
    else:
        raise ValueError(f"unknown backend {name!r}")
    _backend_name = name
    return name


def backend_name() -> str:
    if _backend_name is None:
        use_backend(_default_backend())
    return _backend_name


def _get():
    if _impl is None:
        use_backend(_default_backend())
    return _impl


def march_values(table, out):
    return _get().march_values(table, out)


def march_min(table, n):
    return _get().march_min(table, n)


def march_collect(table, n, thresh, out_idx):
    return _get().march_collect(table, n, thresh, out_idx)
