"""Curves, arcs and boundary grids.

Closed scatterers are smooth counterclockwise curves t -> x(t) on [0, 2pi)
with nonvanishing speed; the unit normal (y', -x')/|x'| then points into the
exterior. Open arcs are pieces of a parent curve, reparameterized by the
cosine substitution so that quadrature nodes cluster at the endpoints.

Grids carry two weight vectors with distinct roles:

    weights          integrate smooth functions of the curve parameter
                     (trapezoid on closed grids; endpoint-aware weights on
                     arcs), used e.g. for lengths and areas;
    density_weights  pair boundary densities with traces. On closed grids
                     the two coincide. On an arc the density weights carry
                     the cosine-substitution Jacobian, which absorbs the
                     inverse-square-root edge blowup of single-layer
                     densities, so spectral accuracy is kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Circle",
    "Ellipse",
    "Kite",
    "TabulatedSmooth",
    "ArcSpec",
    "BoundaryGrid",
    "build_grid",
    "build_arc_grid",
]

_VALIDATE_SAMPLES = 4096


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------

def _stack(x, y):
    return np.stack([np.asarray(x, float), np.asarray(y, float)], axis=-1)


@dataclass(frozen=True)
class Circle:
    """Circle of given radius, counterclockwise."""

    radius: float = 1.0
    center: tuple[float, float] = (0.0, 0.0)

    def validate(self) -> None:
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"circle radius must be positive, got {self.radius!r}")
        if len(self.center) != 2 or not all(math.isfinite(c) for c in self.center):
            raise ValueError(f"circle center must be a finite pair, got {self.center!r}")

    def point(self, t):
        t = np.asarray(t, float)
        return _stack(
            self.center[0] + self.radius * np.cos(t),
            self.center[1] + self.radius * np.sin(t),
        )

    def derivative(self, t):
        t = np.asarray(t, float)
        return _stack(-self.radius * np.sin(t), self.radius * np.cos(t))

    def second_derivative(self, t):
        t = np.asarray(t, float)
        return _stack(-self.radius * np.cos(t), -self.radius * np.sin(t))


@dataclass(frozen=True)
class Ellipse:
    """Axis-aligned ellipse with semi-axes a (horizontal) and b (vertical)."""

    a: float
    b: float
    center: tuple[float, float] = (0.0, 0.0)

    def validate(self) -> None:
        if not (math.isfinite(self.a) and self.a > 0 and math.isfinite(self.b) and self.b > 0):
            raise ValueError(f"ellipse semi-axes must be positive, got a={self.a!r}, b={self.b!r}")
        if len(self.center) != 2 or not all(math.isfinite(c) for c in self.center):
            raise ValueError(f"ellipse center must be a finite pair, got {self.center!r}")

    def point(self, t):
        t = np.asarray(t, float)
        return _stack(
            self.center[0] + self.a * np.cos(t),
            self.center[1] + self.b * np.sin(t),
        )

    def derivative(self, t):
        t = np.asarray(t, float)
        return _stack(-self.a * np.sin(t), self.b * np.cos(t))

    def second_derivative(self, t):
        t = np.asarray(t, float)
        return _stack(-self.a * np.cos(t), -self.b * np.sin(t))


@dataclass(frozen=True)
class Kite:
    """The standard nonconvex kite-shaped test curve."""

    def validate(self) -> None:
        return None

    def point(self, t):
        t = np.asarray(t, float)
        return _stack(np.cos(t) + 0.65 * np.cos(2 * t) - 0.65, 1.5 * np.sin(t))

    def derivative(self, t):
        t = np.asarray(t, float)
        return _stack(-np.sin(t) - 1.3 * np.sin(2 * t), 1.5 * np.cos(t))

    def second_derivative(self, t):
        t = np.asarray(t, float)
        return _stack(-np.cos(t) - 2.6 * np.cos(2 * t), -1.5 * np.sin(t))


@dataclass(frozen=True)
class TabulatedSmooth:
    """Curve given by truncated Fourier series of both coordinates.

    Row m of the four coefficient arrays holds the cos(m t) and sin(m t)
    coefficients of x and y. The text file format is four real columns
    (cos_x, sin_x, cos_y, sin_y), one row per mode starting at m = 0;
    blank lines and '#' comments are ignored.
    """

    cos_x: tuple[float, ...]
    sin_x: tuple[float, ...]
    cos_y: tuple[float, ...]
    sin_y: tuple[float, ...]

    def __post_init__(self):
        for name in ("cos_x", "sin_x", "cos_y", "sin_y"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))

    def validate(self) -> None:
        n = len(self.cos_x)
        if n == 0:
            raise ValueError("tabulated curve needs at least one Fourier mode")
        for name in ("sin_x", "cos_y", "sin_y"):
            if len(getattr(self, name)) != n:
                raise ValueError(
                    f"coefficient arrays must share a length: "
                    f"len(cos_x)={n}, len({name})={len(getattr(self, name))}"
                )
        for name in ("cos_x", "sin_x", "cos_y", "sin_y"):
            if not all(math.isfinite(v) for v in getattr(self, name)):
                raise ValueError(f"{name} contains a non-finite coefficient")
        t = np.linspace(0.0, 2 * np.pi, _VALIDATE_SAMPLES, endpoint=False)
        speed = np.linalg.norm(self.derivative(t), axis=-1)
        if np.min(speed) <= 0.0:
            raise ValueError("tabulated curve has a vanishing tangent")

    def _series(self, t, kind):
        t = np.asarray(t, float)
        m = np.arange(len(self.cos_x))
        mt = np.multiply.outer(t, m)  # (..., modes)
        c, s = np.cos(mt), np.sin(mt)
        ax, bx = np.asarray(self.cos_x), np.asarray(self.sin_x)
        ay, by = np.asarray(self.cos_y), np.asarray(self.sin_y)
        if kind == 0:
            x = c @ ax + s @ bx
            y = c @ ay + s @ by
        elif kind == 1:
            x = -s @ (m * ax) + c @ (m * bx)
            y = -s @ (m * ay) + c @ (m * by)
        else:
            x = -c @ (m * m * ax) - s @ (m * m * bx)
            y = -c @ (m * m * ay) - s @ (m * m * by)
        return _stack(x, y)

    def point(self, t):
        return self._series(t, 0)

    def derivative(self, t):
        return self._series(t, 1)

    def second_derivative(self, t):
        return self._series(t, 2)

    @classmethod
    def from_file(cls, path) -> "TabulatedSmooth":
        data = np.loadtxt(path, ndmin=2)
        if data.shape[1] != 4:
            raise ValueError(
                f"curve file must have 4 columns (cos_x sin_x cos_y sin_y), "
                f"got {data.shape[1]}"
            )
        curve = cls(
            cos_x=tuple(data[:, 0]),
            sin_x=tuple(data[:, 1]),
            cos_y=tuple(data[:, 2]),
            sin_y=tuple(data[:, 3]),
        )
        curve.validate()
        return curve

    def to_file(self, path) -> None:
        data = np.column_stack([self.cos_x, self.sin_x, self.cos_y, self.sin_y])
        np.savetxt(
            path,
            data,
            header="fourier curve coefficients: cos_x sin_x cos_y sin_y, one row per mode",
        )


Curve = Circle | Ellipse | Kite | TabulatedSmooth


@dataclass(frozen=True)
class ArcSpec:
    """Open arc: the piece t in [t0, t1] of a parent curve."""

    curve: Curve
    t0: float
    t1: float

    def validate(self) -> None:
        self.curve.validate()
        if not (math.isfinite(self.t0) and math.isfinite(self.t1)):
            raise ValueError(f"arc endpoints must be finite, got [{self.t0!r}, {self.t1!r}]")
        if not self.t1 > self.t0:
            raise ValueError(f"arc needs t1 > t0, got [{self.t0!r}, {self.t1!r}]")
        if self.t1 - self.t0 >= 2 * math.pi:
            raise ValueError(
                f"arc must be a proper subset of the curve, got span {self.t1 - self.t0!r}"
            )


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class BoundaryGrid:
    """Discretization of a closed curve or an open arc.

    Closed grids hold 2N equispaced nodes t_j = pi j / N. Arc grids hold N
    nodes of the cosine substitution t(s) = t0 + (t1-t0)(1-cos s)/2 at the
    shifted points s_j = (2j+1) pi / (2N), which stay clear of the arc
    endpoints by O(1/N^2).
    """

    kind: str  # "closed" | "arc"
    curve: Curve
    order: int  # the N passed to the builder
    t: np.ndarray
    points: np.ndarray  # (n, 2)
    normals: np.ndarray  # (n, 2), unit, exterior side
    jacobians: np.ndarray  # (n,) |x'(t_j)|
    curvature: np.ndarray  # (n,) signed curvature
    weights: np.ndarray  # (n,) smooth-integrand quadrature in t
    density_weights: np.ndarray  # (n,) density pairing weights
    spacing: float  # max physical gap between neighbor nodes
    # arc-only fields
    s: np.ndarray | None = None
    s_jacobian: np.ndarray | None = None  # c'(s_j) = dt/ds
    t0: float | None = None
    t1: float | None = None
    arc: ArcSpec | None = field(default=None, repr=False)

    @property
    def n_nodes(self) -> int:
        return self.points.shape[0]

    @property
    def is_closed(self) -> bool:
        return self.kind == "closed"


def _frame(curve, t):
    x = curve.point(t)
    dx = curve.derivative(t)
    ddx = curve.second_derivative(t)
    jac = np.hypot(dx[:, 0], dx[:, 1])
    if np.min(jac) <= 0.0 or not np.all(np.isfinite(jac)):
        raise ValueError("curve speed vanishes or is not finite at grid nodes")
    normals = np.stack([dx[:, 1], -dx[:, 0]], axis=-1) / jac[:, None]
    curv = (dx[:, 0] * ddx[:, 1] - dx[:, 1] * ddx[:, 0]) / jac**3
    return x, jac, normals, curv


def build_grid(curve: Curve, N: int) -> BoundaryGrid:
    """Uniform 2N-node grid on a closed counterclockwise curve."""
    curve.validate()
    if not isinstance(N, (int, np.integer)) or N < 8 or N % 2 != 0:
        raise ValueError(f"closed grids need an even integer N >= 8, got {N!r}")
    N = int(N)
    n = 2 * N
    t = np.pi * np.arange(n) / N
    x, jac, normals, curv = _frame(curve, t)
    h = np.pi / N
    signed_area = 0.5 * h * np.sum(
        x[:, 0] * curve.derivative(t)[:, 1] - x[:, 1] * curve.derivative(t)[:, 0]
    )
    if signed_area <= 0.0:
        raise ValueError(
            "curve is oriented clockwise (signed area <= 0); "
            "closed scatterers must run counterclockwise"
        )
    gaps = np.linalg.norm(np.roll(x, -1, axis=0) - x, axis=1)
    w = np.full(n, h)
    return BoundaryGrid(
        kind="closed",
        curve=curve,
        order=N,
        t=t,
        points=x,
        normals=normals,
        jacobians=jac,
        curvature=curv,
        weights=w,
        density_weights=w.copy(),
        spacing=float(np.max(gaps)),
    )


def _fejer1_weights(N: int) -> np.ndarray:
    j = np.arange(N)
    theta = (2 * j + 1) * np.pi / (2 * N)
    m = np.arange(1, N // 2 + 1)
    corr = np.cos(np.outer(theta, 2 * m)) / (4 * m * m - 1)
    return (2.0 / N) * (1.0 - 2.0 * corr.sum(axis=1))


def build_arc_grid(arc: ArcSpec, N: int) -> BoundaryGrid:
    """N-node cosine-substitution grid on an open arc."""
    arc.validate()
    if not isinstance(N, (int, np.integer)) or N < 8:
        raise ValueError(f"arc grids need an integer N >= 8, got {N!r}")
    N = int(N)
    s = (2 * np.arange(N) + 1) * np.pi / (2 * N)
    dt = arc.t1 - arc.t0
    t = arc.t0 + 0.5 * dt * (1.0 - np.cos(s))
    c_prime = 0.5 * dt * np.sin(s)
    x, jac, normals, curv = _frame(arc.curve, t)
    weights = 0.5 * dt * _fejer1_weights(N)
    density_weights = (np.pi / N) * c_prime
    gaps = np.linalg.norm(np.diff(x, axis=0), axis=1)
    return BoundaryGrid(
        kind="arc",
        curve=arc.curve,
        order=N,
        t=t,
        points=x,
        normals=normals,
        jacobians=jac,
        curvature=curv,
        weights=weights,
        density_weights=density_weights,
        spacing=float(np.max(gaps)),
        s=s,
        s_jacobian=c_prime,
        t0=float(arc.t0),
        t1=float(arc.t1),
        arc=arc,
    )
