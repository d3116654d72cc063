"""Backend selection for the hot kernels.

Set ``CKTHERMO_DISABLE_NUMBA=1`` to force the pure-numpy path (also used
automatically when numba cannot be imported).
"""
import os
import warnings

_FLAG = "CKTHERMO_DISABLE_NUMBA"


def numba_requested():
    return os.environ.get(_FLAG, "").strip().lower() not in ("1", "true", "yes", "on")


try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency
    HAVE_NUMBA = False
    if numba_requested():
        warnings.warn("numba is not installed - falling back to numpy kernels")

USE_NUMBA = HAVE_NUMBA and numba_requested()

# extra power-iteration sweeps after the tolerance test passes
POLISH_STEPS = 200
POLISH_PATIENCE = 3
