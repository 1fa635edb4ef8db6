"""Selection of the Monte Carlo kernel backend.

Two interchangeable kernel modules exist: :mod:`steerlab._kernels_numba`
(per-pair loops compiled with ``numba.njit``) and
:mod:`steerlab._kernels_numpy` (the same arithmetic vectorized across pairs).
Both consume identical pre-drawn uniform matrices and perform floating-point
operations in the same order per pair, so their outputs are bit-identical.

The environment variable ``STEERLAB_BACKEND`` picks the implementation:
``numba``, ``numpy``, or ``auto`` (default: numba when importable).
"""

from __future__ import annotations

import os

from .errors import ConfigConflict

ENV_VAR = "STEERLAB_BACKEND"

_modules: dict = {}


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def available_backends() -> tuple:
    names = ["numpy"]
    if _numba_available():
        names.insert(0, "numba")
    return tuple(names)


def active_backend() -> str:
    """Resolve the backend name from the environment (rechecked per call)."""
    raw = os.environ.get(ENV_VAR, "auto").strip().lower() or "auto"
    if raw == "auto":
        return "numba" if _numba_available() else "numpy"
    if raw == "numpy":
        return "numpy"
    if raw == "numba":
        if not _numba_available():
            raise ConfigConflict(f"{ENV_VAR}=numba requested but numba is not importable")
        return "numba"
    raise ConfigConflict(f"{ENV_VAR}={raw!r} is not one of 'numba', 'numpy', 'auto'")


def get_kernels():
    """The kernel module for the currently active backend."""
    name = active_backend()
    mod = _modules.get(name)
    if mod is None:
        if name == "numba":
            from . import _kernels_numba as mod
        else:
            from . import _kernels_numpy as mod
        _modules[name] = mod
    return mod
