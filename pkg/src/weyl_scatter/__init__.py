"""Boundary-integral engine for planar Helmholtz scattering by closed
curves and open arcs with classical and singular boundary couplings."""

from . import _backend

__version__ = "0.1.0"

__all__ = ["__version__", "backend_name"]


def backend_name() -> str:
    """Name of the active special-function backend ('numba' or 'numpy')."""
    return _backend.backend_name()
