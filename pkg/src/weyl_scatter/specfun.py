"""Special functions and the free-space kernel of the planar engine.

Everything the operator layer needs is collected here: real cylinder
functions of integer order, the modified function of complex argument used
off the spectral axis, and the free-space kernel itself, parameterized by a
spectral point that is either off-axis or a boundary limit onto the
continuous spectrum from one side.

The base evaluators (orders 0 and 1) run on a pluggable backend, see
``_backend``. Higher orders are built on top: downward recurrence with
normalization for the first kind, upward recurrence for the second kind.

Conventions
    * The off-axis kernel argument is w = sqrt(z) with the principal root,
      so Re w > 0 off the negative real axis.
    * The limit "minus" (approach from below the cut) produces the outgoing
      kernel (i/4) H0^(1)(k r); "plus" produces its conjugate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from ._anchors import EULER_GAMMA  # noqa: F401  (re-exported for callers)

__all__ = [
    "Branch",
    "LimitBranch",
    "OffAxis",
    "SpectralParameter",
    "bessel_j",
    "bessel_y",
    "hankel1",
    "mod_bessel_k",
    "green_kernel",
    "green_radial_derivative",
]

_MAX_ORDER = 200


# ---------------------------------------------------------------------------
# spectral parameter
# ---------------------------------------------------------------------------

class Branch(enum.Enum):
    """Side from which the spectral axis is approached."""

    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class OffAxis:
    """Spectral point z off the closed negative real half-axis."""

    z: complex

    def __post_init__(self):
        z = complex(self.z)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ValueError(f"spectral point must be finite, got {z!r}")
        if z.imag == 0.0 and z.real <= 0.0:
            raise ValueError(
                f"spectral point {z!r} lies on the closed negative real "
                "axis; use LimitBranch for boundary values"
            )
        object.__setattr__(self, "z", z)

    @property
    def w(self) -> complex:
        """Principal square root of z (kernel argument), Re w > 0."""
        return complex(np.sqrt(complex(self.z)))


@dataclass(frozen=True)
class LimitBranch:
    """Boundary value on the continuous spectrum at wavenumber k."""

    k: float
    branch: Branch = Branch.MINUS

    def __post_init__(self):
        k = float(self.k)
        if not (math.isfinite(k) and k > 0.0):
            raise ValueError(f"wavenumber must be finite and positive, got {k!r}")
        if not isinstance(self.branch, Branch):
            raise ValueError(f"branch must be a Branch member, got {self.branch!r}")
        object.__setattr__(self, "k", k)

    @property
    def w(self) -> complex:
        """Limit of sqrt(z): -ik from below the cut, +ik from above."""
        return -1j * self.k if self.branch is Branch.MINUS else 1j * self.k


SpectralParameter = OffAxis | LimitBranch


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _prep_real(x, name="x"):
    arr = np.asarray(x, dtype=np.float64)
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    if arr.size and np.any(arr <= 0.0):
        raise ValueError(f"{name} must be positive (domain error)")
    return arr


def _prep_complex(w):
    arr = np.asarray(w, dtype=np.complex128)
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError("argument must be finite")
    on_cut = (arr.imag == 0.0) & (arr.real <= 0.0)
    if arr.size and np.any(on_cut):
        raise ValueError(
            "argument on the closed negative real axis (domain error)"
        )
    return arr


def _match(out, x):
    if np.isscalar(x) or np.asarray(x).ndim == 0:
        return out.reshape(())[()]
    return out


def _check_order(n):
    if not isinstance(n, (int, np.integer)):
        raise ValueError(f"order must be an integer, got {n!r}")
    if abs(int(n)) > _MAX_ORDER:
        raise ValueError(f"order |n| <= {_MAX_ORDER} supported, got {n}")
    return int(n)


# ---------------------------------------------------------------------------
# first kind: series and downward recurrence
# ---------------------------------------------------------------------------

def _jn_series(n, x):
    """Direct series for order n >= 2 at x <= 2 (no cancellation here)."""
    half = 0.5 * x
    lead = np.ones_like(x)
    for j in range(1, n + 1):
        lead = lead * (half / j)
    q = half * half
    term = np.ones_like(x)
    total = term.copy()
    for m in range(1, 26):
        term = term * (-q / (m * (n + m)))
        total = total + term
    return lead * total


def _miller_start(n_max, xmax):
    base = max(float(n_max), xmax, 1.0)
    return int(base + 16 + 8.0 * math.sqrt(base))


def _bessel_j_all(n_max, x):
    """J_0..J_{n_max} on a positive 1-d array via normalized downward
    recurrence (orders 0 and 1 are later overwritten by the base kernels,
    which are cheaper and at least as accurate)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.zeros((n_max + 1, x.size))
    start = _miller_start(n_max, float(np.max(x)) if x.size else 1.0)
    jp = np.zeros_like(x)
    jc = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    for m in range(start, -1, -1):
        if m <= n_max:
            out[m] = jc
        if m == 0:
            norm = norm + jc
        elif m % 2 == 0:
            norm = norm + 2.0 * jc
        if m > 0:
            jm1 = (2.0 * m / x) * jc - jp
            jp = jc
            jc = jm1
            big = np.abs(jc) > 1e250
            if np.any(big):
                scale = np.where(big, 1e-250, 1.0)
                jc = jc * scale
                jp = jp * scale
                norm = norm * scale
                out = out * scale[np.newaxis, :]
    out = out / norm[np.newaxis, :]
    table = _backend.get_table()
    out[0] = table["j0"](x)
    if n_max >= 1:
        out[1] = table["j1"](x)
    return out


def bessel_j(n, x):
    """Bessel function of the first kind, integer order, x > 0."""
    n = _check_order(n)
    sign = 1.0
    if n < 0:
        n = -n
        if n % 2 == 1:
            sign = -1.0
    arr = _prep_real(x)
    flat = arr.ravel()
    table = _backend.get_table()
    if n == 0:
        out = table["j0"](flat)
    elif n == 1:
        out = table["j1"](flat)
    else:
        out = np.empty_like(flat)
        small = flat <= 2.0
        if np.any(small):
            out[small] = _jn_series(n, flat[small])
        if np.any(~small):
            out[~small] = _bessel_j_all(n, flat[~small])[n]
    out = sign * out
    return _match(out.reshape(arr.shape), x)


def bessel_y(n, x):
    """Bessel function of the second kind, integer order, x > 0."""
    n = _check_order(n)
    sign = 1.0
    if n < 0:
        n = -n
        if n % 2 == 1:
            sign = -1.0
    arr = _prep_real(x)
    flat = arr.ravel()
    table = _backend.get_table()
    y0v = table["y0"](flat)
    if n == 0:
        out = y0v
    else:
        y1v = table["y1"](flat)
        if n == 1:
            out = y1v
        else:
            ym, yc = y0v, y1v
            # upward recurrence is stable for the second kind
            with np.errstate(over="ignore", invalid="ignore"):
                for m in range(1, n):
                    ym, yc = yc, (2.0 * m / flat) * yc - ym
            out = yc
    out = sign * out
    return _match(out.reshape(arr.shape), x)


def _bessel_y_all(n_max, x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    table = _backend.get_table()
    out = np.zeros((n_max + 1, x.size))
    out[0] = table["y0"](x)
    if n_max >= 1:
        out[1] = table["y1"](x)
    with np.errstate(over="ignore", invalid="ignore"):
        for m in range(1, n_max):
            out[m + 1] = (2.0 * m / x) * out[m] - out[m - 1]
    return out


def hankel1(n, x):
    """Hankel function of the first kind, integer order, x > 0."""
    return bessel_j(n, x) + 1j * bessel_y(n, x)


def mod_bessel_k(order, w):
    """Modified function of the second kind, order 0 or 1, complex argument
    off the closed negative real axis."""
    if order not in (0, 1):
        raise ValueError(f"order must be 0 or 1, got {order!r}")
    arr = _prep_complex(w)
    flat = arr.ravel()
    table = _backend.get_table()
    out = table["k0"](flat) if order == 0 else table["k1"](flat)
    return _match(out.reshape(arr.shape), w)


# internal complex-order-zero/one modified functions of the first kind,
# used by the operator layer for kernel splitting off the spectral axis
def _mod_i(order, w_arr):
    table = _backend.get_table()
    return table["i0"](w_arr) if order == 0 else table["i1"](w_arr)


# ---------------------------------------------------------------------------
# free-space kernel
# ---------------------------------------------------------------------------

def green_kernel(s: SpectralParameter, r):
    """Free-space kernel value at distance r > 0 for spectral point s.

    Off-axis: (1/2 pi) K_0(w r) with w = sqrt(z). Limit minus gives the
    outgoing kernel (i/4) H_0^(1)(k r); limit plus gives its conjugate.
    """
    arr = _prep_real(r, name="r")
    flat = arr.ravel()
    table = _backend.get_table()
    if isinstance(s, OffAxis):
        out = table["k0"](s.w * flat) / (2.0 * np.pi)
    elif isinstance(s, LimitBranch):
        kr = s.k * flat
        h = table["j0"](kr) + 1j * table["y0"](kr)
        out = 0.25j * h if s.branch is Branch.MINUS else np.conj(0.25j * h)
    else:
        raise TypeError(f"not a spectral parameter: {s!r}")
    return _match(out.reshape(arr.shape), r)


def green_radial_derivative(s: SpectralParameter, r):
    """Radial derivative of the free-space kernel at distance r > 0."""
    arr = _prep_real(r, name="r")
    flat = arr.ravel()
    table = _backend.get_table()
    if isinstance(s, OffAxis):
        w = s.w
        out = -(w / (2.0 * np.pi)) * table["k1"](w * flat)
    elif isinstance(s, LimitBranch):
        kr = s.k * flat
        h = table["j1"](kr) + 1j * table["y1"](kr)
        out = -0.25j * s.k * h
        if s.branch is Branch.PLUS:
            out = np.conj(out)
    else:
        raise TypeError(f"not a spectral parameter: {s!r}")
    return _match(out.reshape(arr.shape), r)


def _log_split_pair(s: SpectralParameter, r_flat):
    """Values (I_0(w r), w I_1(w r)) driving the logarithmic kernel split.

    On the limit branches these collapse to (J_0(k r), -k J_1(k r)) for both
    signs, since I_0(-+ ikr) = J_0(kr) and (-+ ik) I_1(-+ ikr) = -k J_1(kr).
    """
    table = _backend.get_table()
    if isinstance(s, OffAxis):
        w = s.w
        return table["i0"](w * r_flat), w * table["i1"](w * r_flat)
    if isinstance(s, LimitBranch):
        kr = s.k * r_flat
        return (
            table["j0"](kr).astype(np.complex128),
            (-s.k * table["j1"](kr)).astype(np.complex128),
        )
    raise TypeError(f"not a spectral parameter: {s!r}")
