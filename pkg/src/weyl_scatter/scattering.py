"""Far fields, scattering matrices, eigenfunctions and perturbed kernels.

Conventions (recorded in output manifests):

* The angular kernel is stored as s[m_out, m_in]: row index is the
  observation direction, column index the incident direction.
* The scattered wave of a unit plane wave from direction d behaves like
  u_sc ~ c(k) F(xi) e^{ikr} / sqrt(r) with spreading constant
  c(k) = (i/4) sqrt(2/(pi k)) e^{-i pi/4} and pattern F = 4 pi i s.
* The unitary scattering matrix on an M-point direction grid is
  S = I - (2 pi / M) s; its eigenvalues lie on the unit circle.

The adjoint evaluation path solves the incoming-limit system at the
observation direction and pairs it with the incident trace data; it agrees
with the direct path by conjugation symmetry of the boundary operators and
gives an independent end-to-end consistency check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import layerops, specfun, weyl
from .geometry import BoundaryGrid
from .specfun import Branch, LimitBranch, SpectralParameter

__all__ = [
    "DirectionGrid",
    "FarField",
    "SMatrix",
    "cross_section",
    "far_field",
    "generalized_eigenfunction",
    "resolvent_kernel",
    "s_matrix",
    "scattering_kernel",
    "spreading_constant",
]


@dataclass(frozen=True)
class DirectionGrid:
    """Uniform grid of m unit directions on the circle."""

    m: int

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 4:
            raise ValueError(f"direction grids need an integer m >= 4, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))

    @property
    def thetas(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.m) / self.m

    @property
    def vectors(self) -> np.ndarray:
        th = self.thetas
        return np.stack([np.cos(th), np.sin(th)], axis=1)

    @property
    def weight(self) -> float:
        return 2.0 * np.pi / self.m


def spreading_constant(k: float) -> complex:
    """Cylindrical spreading factor c(k) in u_sc ~ c(k) F e^{ikr}/sqrt(r)."""
    return 0.25j * math.sqrt(2.0 / (math.pi * k)) * np.exp(-0.25j * np.pi)


def convention_record() -> dict:
    """Output conventions, embedded into run manifests."""
    return {
        "kernel_indexing": "s[m_out, m_in], rows observe, columns illuminate",
        "kernel_prefactor": "s = -(i / 4 pi) F with F the boundary far-field sum",
        "spreading_constant": "c(k) = (i/4) sqrt(2/(pi k)) exp(-i pi/4)",
        "physical_pattern": "F = 4 pi i s multiplies c(k) e^{ikr}/sqrt(r)",
        "scattering_matrix": "S = I - (2 pi / M) s",
    }


def _batched_traces(k: float, grid: BoundaryGrid, directions: np.ndarray):
    g0 = np.exp(1j * k * grid.points @ directions.T)  # (n, M)
    g1 = 1j * k * (grid.normals @ directions.T) * g0
    return g0, g1


def _farfield_matrix(k, grid, phi, psi, directions):
    """Far-field sums for batched densities; returns (M_out, M_in)."""
    wq = grid.density_weights * grid.jacobians
    phase = np.exp(-1j * k * directions @ grid.points.T)  # (Mo, n)
    dn = directions @ grid.normals.T
    return phase @ (wq[:, None] * phi) - 1j * k * (phase * dn) @ (wq[:, None] * psi)


def scattering_kernel(
    bc: weyl.BoundaryCondition,
    k: float,
    grid: BoundaryGrid,
    directions: DirectionGrid,
    form: str = "direct",
) -> np.ndarray:
    """Angular kernel s[m_out, m_in] on a uniform direction grid.

    form="direct" solves the outgoing-limit system per incident direction;
    form="adjoint" solves the incoming-limit system per observation
    direction and pairs it with the incident traces.
    """
    vecs = directions.vectors
    if form == "direct":
        s = LimitBranch(k=k, branch=Branch.MINUS)
        sys = weyl.assemble_weyl(bc, layerops.assemble(s, grid))
        g0, g1 = _batched_traces(k, grid, vecs)
        dens = sys.solve(g0, g1)
        return -0.25j / np.pi * _farfield_matrix(k, grid, dens.phi, dens.psi, vecs)
    if form == "adjoint":
        s = LimitBranch(k=k, branch=Branch.PLUS)
        sys = weyl.assemble_weyl(bc, layerops.assemble(s, grid))
        g0, g1 = _batched_traces(k, grid, vecs)
        dens = sys.solve(g0, g1)  # column j: incoming solve for direction j
        wq = grid.density_weights * grid.jacobians
        pairing = dens.phi.conj().T @ (wq[:, None] * g0) + dens.psi.conj().T @ (
            wq[:, None] * g1
        )
        return -0.25j / np.pi * pairing
    raise ValueError(f"form must be 'direct' or 'adjoint', got {form!r}")


@dataclass(eq=False)
class FarField:
    """Angular kernel together with its direction grids and conventions."""

    k: float
    thetas_out: np.ndarray
    thetas_in: np.ndarray
    kernel: np.ndarray

    @property
    def physical_pattern(self) -> np.ndarray:
        return 4.0j * np.pi * self.kernel

    @property
    def spreading(self) -> complex:
        return spreading_constant(self.k)


def far_field(
    bc: weyl.BoundaryCondition,
    k: float,
    grid: BoundaryGrid,
    directions: DirectionGrid,
) -> FarField:
    kern = scattering_kernel(bc, k, grid, directions)
    th = directions.thetas
    return FarField(k=k, thetas_out=th, thetas_in=th, kernel=kern)


@dataclass(eq=False)
class SMatrix:
    """Unitary scattering matrix on a uniform direction grid."""

    k: float
    m: int
    kernel: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.eye(self.m) - (2.0 * np.pi / self.m) * self.kernel

    def unitarity_residual(self) -> float:
        sm = self.matrix
        return float(np.linalg.norm(sm @ sm.conj().T - np.eye(self.m), 2))


def s_matrix(
    bc: weyl.BoundaryCondition,
    k: float,
    grid: BoundaryGrid,
    directions: DirectionGrid,
    form: str = "direct",
) -> SMatrix:
    kern = scattering_kernel(bc, k, grid, directions, form=form)
    return SMatrix(k=k, m=directions.m, kernel=kern)


def cross_section(kernel: np.ndarray, m_in: int) -> float:
    """Angular cross section of column m_in: sum_m (2 pi / M) |s[m, m_in]|^2.

    Unitarity makes this equal 2 Re s[m_in, m_in]; multiply by 2 pi / k for
    the physical scattering width.
    """
    m = kernel.shape[0]
    return float((2.0 * np.pi / m) * np.sum(np.abs(kernel[:, m_in]) ** 2))


def generalized_eigenfunction(
    bc: weyl.BoundaryCondition,
    k: float,
    grid: BoundaryGrid,
    direction,
    points,
) -> np.ndarray:
    """Total field (incident plane wave plus scattered wave) at field points."""
    d = np.asarray(direction, float)
    s = LimitBranch(k=k, branch=Branch.MINUS)
    sys = weyl.assemble_weyl(bc, layerops.assemble(s, grid))
    g0, g1 = weyl.trace_plane_wave(k, d, grid)
    dens = sys.solve(g0, g1)
    pts = np.atleast_2d(np.asarray(points, float))
    incident = np.exp(1j * k * pts @ d)
    return incident + layerops.eval_potential(s, grid, dens.phi, dens.psi, pts)


def resolvent_kernel(
    bc: weyl.BoundaryCondition,
    s: SpectralParameter,
    grid: BoundaryGrid,
    points,
    source,
) -> np.ndarray:
    """Perturbed kernel R(x, y0): free kernel plus boundary correction.

    The correction solves the same boundary system as plane-wave scattering
    with the free-kernel traces of the source column as data.
    """
    y0 = np.asarray(source, float)
    dxy = grid.points - y0[None, :]
    r = np.hypot(dxy[:, 0], dxy[:, 1])
    if np.min(r) <= 0:
        raise ValueError("source point lies on the boundary")
    g0 = specfun.green_kernel(s, r)
    g1 = specfun.green_radial_derivative(s, r) * np.einsum("jc,jc->j", dxy, grid.normals) / r
    sys = weyl.assemble_weyl(bc, layerops.assemble(s, grid))
    dens = sys.solve(g0, g1)
    pts = np.atleast_2d(np.asarray(points, float))
    dps = pts - y0[None, :]
    rp = np.hypot(dps[:, 0], dps[:, 1])
    free = specfun.green_kernel(s, rp)
    return free + layerops.eval_potential(s, grid, dens.phi, dens.psi, pts)
