"""Kernel backend selection.

The hot numeric kernels exist twice: numba-compiled (_kernels_numba) and
pure numpy (_kernels_numpy). The active implementation is picked at import
from the SAMPLEMEANS_BACKEND environment variable ("numba" or "numpy");
when unset, numba is preferred and numpy is the fallback if numba cannot be
imported. use() switches backends at runtime, which the kernel benchmark
relies on.

Each backend is deterministic: identical inputs give bit-identical outputs.
Across backends results agree only up to floating-point round-off, because
summation orders differ.
"""

import logging
import os

log = logging.getLogger(__name__)

ENV_VAR = "SAMPLEMEANS_BACKEND"

_active = None
_active_name = None


def available():
    """Backend names usable in this environment, preferred first."""
    names = ["numpy"]
    try:
        import numba  # noqa: F401

        names.insert(0, "numba")
    except ImportError:
        pass
    return names


def use(name):
    """Activate a backend by name; returns the name on success."""
    global _active, _active_name
    if name == "numpy":
        from . import _kernels_numpy as mod
    elif name == "numba":
        from . import _kernels_numba as mod
    else:
        raise ValueError(f"unknown backend {name!r}: expected 'numba' or 'numpy'")
    _active = mod
    _active_name = name
    return name


def name():
    """Name of the currently active backend."""
    return _active_name


def assign_labels(X, C):
    return _active.assign_labels(X, C)


def label_sums(X, labels, k):
    return _active.label_sums(X, labels, k)


def sqdist_to_point(X, y):
    return _active.sqdist_to_point(X, y)


def _init():
    requested = os.environ.get(ENV_VAR, "").strip().lower()
    if requested:
        use(requested)
        return
    try:
        use("numba")
    except ImportError:
        log.warning("numba unavailable, using the pure numpy backend")
        use("numpy")


_init()
