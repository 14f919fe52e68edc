"""Optional numba acceleration.

Kernels in :mod:`divclust.kernels` ship two implementations: a loop-based one
compiled with ``numba.njit`` and a vectorised pure-numpy one.  The compiled
path is used when numba imports cleanly and the ``DIVCLUST_NUMBA``
environment variable is not set to a false value (``0``, ``false``, ``no``,
``off``).  The variable is read on every dispatch, so tests and benchmarks
can flip it at runtime.
"""
from __future__ import annotations

import os

try:  # pragma: no cover - exercised implicitly
    import numba as _numba
except ImportError:  # pragma: no cover
    _numba = None

ENV_FLAG = "DIVCLUST_NUMBA"
_FALSE = {"0", "false", "no", "off"}

HAVE_NUMBA = _numba is not None


def numba_enabled() -> bool:
    if _numba is None:
        return False
    return os.environ.get(ENV_FLAG, "1").strip().lower() not in _FALSE


def backend() -> str:
    return "numba" if numba_enabled() else "numpy"


def njit(*args, **kwargs):
    """``numba.njit`` with on-disk caching, or the identity when numba is absent."""
    if _numba is None:
        if args and callable(args[0]):
            return args[0]
        return lambda fn: fn
    kwargs.setdefault("cache", True)
    return _numba.njit(*args, **kwargs)
