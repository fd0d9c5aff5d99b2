"""Backend selection for the special-function evaluation kernels.

Two interchangeable kernel tables exist: numba-compiled ufuncs and pure
numpy array code. The active table is chosen once at import time from the
``WEYL_SCATTER_BACKEND`` environment variable:

    auto   prefer numba, fall back to numpy if numba is unavailable (default)
    numba  require numba; raise if it cannot be imported
    numpy  force the pure-numpy path

``set_backend`` flips the table inside a running process; it exists for the
equivalence tests and the benchmark script. Results agree between backends
to rounding (about 1e-13 relative), not bitwise.
"""

from __future__ import annotations

import logging
import os

logger = logging.getLogger(__name__)

_ENV_VAR = "WEYL_SCATTER_BACKEND"
_VALID = ("auto", "numba", "numpy")

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

_active_name = None
_active_table = None


def _load_table(name):
    if name == "numba":
        from . import _kernels_numba as mod
    else:
        from . import _kernels_numpy as mod
    return {
        "j0": mod.j0,
        "j1": mod.j1,
        "y0": mod.y0,
        "y1": mod.y1,
        "k0": mod.k0,
        "k1": mod.k1,
        "i0": mod.i0,
        "i1": mod.i1,
    }


def set_backend(name: str) -> str:
    """Select the kernel backend by name ('auto', 'numba' or 'numpy')."""
    global _active_name, _active_table
    if name not in _VALID:
        raise ValueError(
            f"unknown backend {name!r}: expected one of {', '.join(_VALID)}"
        )
    if name == "auto":
        resolved = "numba" if HAS_NUMBA else "numpy"
    elif name == "numba":
        if not HAS_NUMBA:
            raise RuntimeError(
                "backend 'numba' requested but numba is not importable"
            )
        resolved = "numba"
    else:
        resolved = "numpy"
    _active_table = _load_table(resolved)
    _active_name = resolved
    logger.debug("special-function backend set to %s", resolved)
    return resolved


def backend_name() -> str:
    return _active_name


def get_table() -> dict:
    return _active_table


_requested = os.environ.get(_ENV_VAR, "auto").strip().lower()
if _requested not in _VALID:
    raise RuntimeError(
        f"{_ENV_VAR}={_requested!r} is not a valid backend; "
        f"expected one of {', '.join(_VALID)}"
    )
set_backend(_requested)
