"""Boundary-condition systems in resolvent-difference form.

Each supported boundary condition selects a block of the boundary operator
matrix

    L = [[V, K], [Kp, T]]

and couples it to a condition-specific multiplication block. Writing
``theta`` for that block and ``P`` for the selector onto the active density
components, every condition below is solved through a linear system whose
unscaled form is

    (theta - P L P') densities = traces,

the same structure for point interactions (delta, delta'), classical
conditions (Dirichlet, Neumann) and two-sided Robin coupling. Production
solves use row-scaled variants that stay bounded as interaction strengths
grow or vanish; ``unscaled_matrix`` exposes the raw form for cross-checks.

Sign and side conventions, with exterior unit normals:

    one-sided traces of the layer potentials:
        gamma0 DL = (K +/- 1/2) psi,   gamma1 SL = (Kp -/+ 1/2) phi,
        upper sign on the side the normal points into
    jumps across the curve:  [gamma0 u] = psi,  [gamma1 u] = -phi

so ``phi`` is the single-layer density (minus the normal-derivative jump)
and ``psi`` the double-layer density (the trace jump).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .geometry import BoundaryGrid
from .layerops import LayerOperatorSet

__all__ = [
    "BoundaryCondition",
    "Delta",
    "DeltaPrime",
    "DensityPair",
    "Dirichlet",
    "Neumann",
    "NumericalError",
    "Robin",
    "WeylSystem",
    "assemble_weyl",
    "trace_plane_wave",
]

logger = logging.getLogger(__name__)

Coefficient = Union[float, Callable[[np.ndarray], np.ndarray]]

_RESIDUAL_LIMIT = 1e-8
_COND_LIMIT = 1e13


class NumericalError(RuntimeError):
    """Raised when a boundary system is singular or numerically unreliable."""


def _eval_coefficient(c: Coefficient, t: np.ndarray, name: str) -> np.ndarray:
    if callable(c):
        vals = np.asarray(c(t), dtype=float)
        vals = np.broadcast_to(vals, t.shape).astype(float)
    else:
        vals = np.full(t.shape, float(c))
    if not np.all(np.isfinite(vals)):
        raise ValueError(f"coefficient {name} evaluates to non-finite values")
    return vals


@dataclass(frozen=True)
class Dirichlet:
    """Vanishing trace on both sides of the curve."""

    selector = "phi"

    def describe(self) -> str:
        return "dirichlet"


@dataclass(frozen=True)
class Neumann:
    """Vanishing normal derivative on both sides of the curve."""

    selector = "psi"

    def describe(self) -> str:
        return "neumann"


@dataclass(frozen=True)
class Robin:
    """Separated first-order conditions gamma1 u = b gamma0 u on each side.

    b_minus applies on the side opposite the normal, b_plus on the normal
    side; their difference must stay away from zero for the coupling block
    to be defined.
    """

    b_minus: Coefficient
    b_plus: Coefficient

    selector = "both"

    def describe(self) -> str:
        return "robin"

    def blocks(self, t: np.ndarray):
        bm = _eval_coefficient(self.b_minus, t, "b_minus")
        bp = _eval_coefficient(self.b_plus, t, "b_plus")
        jump = bp - bm
        if np.any(np.abs(jump) < 1e-13 * (1.0 + np.abs(bp) + np.abs(bm))):
            raise ValueError("robin coefficients must differ pointwise")
        return bm, bp, jump, 0.5 * (bp + bm)


@dataclass(frozen=True)
class Delta:
    """Trace-continuous point interaction of strength alpha >= 0.

    The normal-derivative jump is alpha times the common trace; alpha = 0
    switches the interaction off.
    """

    alpha: Coefficient

    selector = "phi"

    def describe(self) -> str:
        return "delta"

    def strength(self, t: np.ndarray) -> np.ndarray:
        a = _eval_coefficient(self.alpha, t, "alpha")
        if np.any(a < 0):
            raise ValueError("delta strength alpha must be nonnegative")
        return a


@dataclass(frozen=True)
class DeltaPrime:
    """Derivative-continuous point interaction of strength beta.

    The trace jump is beta times the common normal derivative; beta = 0
    switches the interaction off.
    """

    beta: Coefficient

    selector = "psi"

    def describe(self) -> str:
        return "delta_prime"

    def strength(self, t: np.ndarray) -> np.ndarray:
        return _eval_coefficient(self.beta, t, "beta")


BoundaryCondition = Union[Dirichlet, Neumann, Robin, Delta, DeltaPrime]


@dataclass(eq=False)
class DensityPair:
    """Single-layer and double-layer density nodal values (possibly batched
    along the trailing axis)."""

    phi: np.ndarray
    psi: np.ndarray


def trace_plane_wave(k: float, direction, grid: BoundaryGrid):
    """Trace and normal-derivative trace of exp(i k d . x) on the grid."""
    d = np.asarray(direction, float)
    g0 = np.exp(1j * k * grid.points @ d)
    g1 = 1j * k * (grid.normals @ d) * g0
    return g0, g1


@dataclass(eq=False)
class WeylSystem:
    """Factorizable linear system realizing one boundary condition."""

    bc: BoundaryCondition
    ops: LayerOperatorSet
    matrix: np.ndarray
    _cond: float | None = field(default=None, repr=False)

    @property
    def grid(self) -> BoundaryGrid:
        return self.ops.grid_row

    # -- right-hand sides -------------------------------------------------
    def rhs(self, g0, g1) -> np.ndarray:
        g0 = np.asarray(g0, complex)
        g1 = np.asarray(g1, complex)
        bc = self.bc
        t = self.grid.t
        if isinstance(bc, Dirichlet):
            return g0
        if isinstance(bc, Neumann):
            return g1
        if isinstance(bc, Delta):
            a = bc.strength(t)
            return -_colscale(a, g0)
        if isinstance(bc, DeltaPrime):
            b = bc.strength(t)
            return _colscale(b, g1)
        return np.concatenate([g0, g1], axis=0)

    # -- solve ------------------------------------------------------------
    def solve(self, g0, g1) -> DensityPair:
        """Solve for the layer densities given trace data (batched along a
        trailing axis if present)."""
        b = self.rhs(g0, g1)
        try:
            x = np.linalg.solve(self.matrix, b)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"boundary system is singular: {exc}") from exc
        if not np.all(np.isfinite(x)):
            raise NumericalError("boundary system produced non-finite densities")
        scale = np.linalg.norm(self.matrix, 1) * _norm1(x) + _norm1(b)
        resid = _norm1(self.matrix @ x - b)
        if resid > _RESIDUAL_LIMIT * max(scale, 1e-300):
            raise NumericalError(
                f"boundary solve unreliable: relative residual {resid / scale:.2e}"
            )
        cond = self.cond_estimate()
        if not cond < _COND_LIMIT:
            raise NumericalError(
                f"boundary system is numerically singular (condition estimate "
                f"{cond:.2e}); refusing to interpret the solve"
            )
        return self._split(x)

    def _split(self, x) -> DensityPair:
        n = self.grid.n_nodes
        zeros = np.zeros_like(x[:n] if x.shape[0] >= n else x)
        sel = self.bc.selector
        if sel == "phi":
            return DensityPair(phi=x, psi=zeros)
        if sel == "psi":
            return DensityPair(phi=zeros, psi=x)
        return DensityPair(phi=x[:n], psi=x[n:])

    # -- diagnostics -------------------------------------------------------
    def cond_estimate(self) -> float:
        """1-norm condition estimate (Hager style), cached."""
        if self._cond is None:
            self._cond = _cond1_estimate(self.matrix)
        return self._cond

    def unscaled_matrix(self) -> np.ndarray:
        """The raw block form (theta - P L P'); point interactions require
        nonvanishing strength here."""
        bc = self.bc
        ops = self.ops
        t = self.grid.t
        if isinstance(bc, Dirichlet):
            return -ops.V
        if isinstance(bc, Neumann):
            return -ops.T
        if isinstance(bc, Delta):
            a = bc.strength(t)
            if np.any(a == 0):
                raise ValueError("unscaled delta form needs alpha > 0 pointwise")
            return -np.diag(1.0 / a) - ops.V
        if isinstance(bc, DeltaPrime):
            b = bc.strength(t)
            if np.any(b == 0):
                raise ValueError("unscaled delta-prime form needs beta != 0 pointwise")
            return np.diag(1.0 / b) - ops.T
        return self.matrix  # robin production form is already unscaled


def _colscale(diag, mat):
    """diag(d) @ mat for vector or batched right-hand sides."""
    return diag[:, None] * mat if mat.ndim == 2 else diag * mat


def _norm1(x) -> float:
    return float(np.max(np.sum(np.abs(x), axis=0))) if x.ndim == 2 else float(
        np.sum(np.abs(x))
    )


def assemble_weyl(bc: BoundaryCondition, ops: LayerOperatorSet) -> WeylSystem:
    """Build the production linear system for one boundary condition."""
    n = ops.grid_row.n_nodes
    t = ops.grid_row.t
    eye = np.eye(n)
    if isinstance(bc, Dirichlet):
        mat = -ops.V
    elif isinstance(bc, Neumann):
        mat = -ops.T
    elif isinstance(bc, Delta):
        a = bc.strength(t)
        mat = eye + a[:, None] * ops.V
    elif isinstance(bc, DeltaPrime):
        b = bc.strength(t)
        mat = eye - b[:, None] * ops.T
    elif isinstance(bc, Robin):
        bm, bp, jump, mean = bc.blocks(t)
        mat = -np.block(
            [
                [np.diag(1.0 / jump) + ops.V, np.diag(mean / jump) + ops.K],
                [np.diag(mean / jump) + ops.Kp, np.diag(bp * bm / jump) + ops.T],
            ]
        )
    else:
        raise TypeError(f"unsupported boundary condition {bc!r}")
    return WeylSystem(bc=bc, ops=ops, matrix=np.asarray(mat, complex))


def _cond1_estimate(a: np.ndarray) -> float:
    """Lower estimate of the 1-norm condition number via Hager iteration."""
    n = a.shape[0]
    anorm = np.linalg.norm(a, 1)
    try:
        x = np.full(n, 1.0 / n, dtype=complex)
        gamma = 0.0
        for _ in range(5):
            y = np.linalg.solve(a, x)
            g_new = float(np.sum(np.abs(y)))
            xi = np.where(np.abs(y) > 0, y / np.abs(y), 1.0)
            z = np.linalg.solve(a.conj().T, xi)
            j = int(np.argmax(np.abs(z)))
            if g_new <= gamma or np.abs(z[j]) <= np.real(np.vdot(z, x)) + 1e-16:
                gamma = max(gamma, g_new)
                break
            gamma = g_new
            x = np.zeros(n, dtype=complex)
            x[j] = 1.0
        # alternating comparison vector guards against unlucky starts
        v = ((-1.0) ** np.arange(n)) * (1.0 + np.arange(n) / max(n - 1, 1))
        gamma = max(gamma, 2.0 * float(np.sum(np.abs(np.linalg.solve(a, v + 0j)))) / (3.0 * n))
    except np.linalg.LinAlgError:
        return float("inf")
    return anorm * gamma
