"""Kernel backend selection.

Hot numeric loops ship in two interchangeable implementations: numba-compiled
kernels and pure-numpy fallbacks. The active backend is chosen once at import
time from the ``TRANSHMM_BACKEND`` environment variable (``"numba"`` or
``"numpy"``); when numba is requested but not importable the numpy path is
used and a warning is emitted.
"""

from __future__ import annotations

import os
import warnings

VALID_BACKENDS = ("numba", "numpy")


def requested_backend() -> str:
    """Backend named by the environment, defaulting to numba."""
    name = os.environ.get("TRANSHMM_BACKEND", "numba").strip().lower()
    if name not in VALID_BACKENDS:
        raise ValueError(
            f"TRANSHMM_BACKEND must be one of {VALID_BACKENDS}, got {name!r}"
        )
    return name


def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def resolve_backend(name: str | None = None) -> str:
    """Resolve a backend name to one that can actually run."""
    if name is None:
        name = requested_backend()
    if name not in VALID_BACKENDS:
        raise ValueError(
            f"backend must be one of {VALID_BACKENDS}, got {name!r}"
        )
    if name == "numba" and not numba_available():
        warnings.warn(
            "numba requested but not importable; using the numpy backend",
            RuntimeWarning,
            stacklevel=2,
        )
        return "numpy"
    return name


ACTIVE_BACKEND = resolve_backend()
