"""Selection between the numba-compiled kernels and the plain numpy path.

The default is numba when it imports cleanly. Setting ``WCLIQUE_DISABLE_NUMBA``
to a truthy value at import time (or calling :func:`set_backend`) routes every
kernel through the numpy implementation instead.
"""

import os

_TRUTHY = {"1", "true", "yes", "on"}

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


def _initial_backend():
    if os.environ.get("WCLIQUE_DISABLE_NUMBA", "").strip().lower() in _TRUTHY:
        return "numpy"
    return "numba" if HAVE_NUMBA else "numpy"


_backend = _initial_backend()


def get_backend():
    return _backend


def set_backend(name):
    """Switch kernels to ``"numba"`` or ``"numpy"``; returns the previous name."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    previous, _backend = _backend, name
    return previous
