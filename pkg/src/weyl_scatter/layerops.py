"""Dense boundary-operator assembly and potential evaluation.

The four boundary operators of the direct method are assembled as dense
complex matrices acting on nodal density values:

    V    single-layer trace
    K    double-layer trace (principal value part)
    Kp   adjoint double-layer trace (principal value part)
    T    hypersingular trace, realized through the Maue rewrite
         T = J^-1 d/dt . V0 . d/dtau - w^2 V_nn

Closed curves use the spectral splitting of the logarithmic singularity:
kernel = A(t, tau) ln(4 sin^2((t-tau)/2)) + B(t, tau) with A, B smooth, the
log factor integrated by the exact trigonometric product rule and B by the
trapezoid rule. The same splitting runs on open arcs in the cosine
parameter, where the doubled-cover fold

    R+[i, j] = R((s_i - s_j)) + R((s_i + s_j))

integrates ln[4 (cos s_j - cos s_i)^2] exactly against the even extension
class. Density parity on arcs: single-layer densities (with the cosine
Jacobian folded in) extend evenly, double-layer densities oddly; the
derivative inside the Maue form therefore extends evenly, and the two
extension-aware differentiation matrices below keep every stage spectral.

All quadrature weights are folded into the matrices, so a matvec consumes
plain nodal values and returns nodal trace values.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import specfun
from .geometry import BoundaryGrid
from .specfun import EULER_GAMMA, SpectralParameter

__all__ = [
    "LayerOperatorSet",
    "assemble",
    "eval_potential",
    "eval_potential_gradient",
    "exclusion_mask",
    "far_field_row",
    "log_quadrature_weights",
    "trig_diff_matrix",
]

logger = logging.getLogger(__name__)

_FOUR_PI = 4.0 * np.pi
_TWO_PI = 2.0 * np.pi
EXCLUSION_FACTOR = 3.0


@dataclass(eq=False)
class LayerOperatorSet:
    """Assembled boundary operators at one spectral point."""

    s: SpectralParameter
    grid_row: BoundaryGrid
    grid_col: BoundaryGrid
    V: np.ndarray
    K: np.ndarray
    Kp: np.ndarray
    T: np.ndarray

    @property
    def grid(self) -> BoundaryGrid:
        return self.grid_row


# ---------------------------------------------------------------------------
# quadrature building blocks
# ---------------------------------------------------------------------------

def log_quadrature_weights(N: int) -> np.ndarray:
    """Values R_d of the product rule for ln(4 sin^2(./2)) on a uniform
    2N-point grid, indexed by the node offset d = 0..2N-1."""
    d = np.arange(2 * N)
    theta = d * np.pi / N
    m = np.arange(1, N)
    r = -(_TWO_PI / N) * (np.cos(np.outer(theta, m)) / m).sum(axis=1)
    r -= (np.pi / N**2) * np.cos(N * theta)
    return r


def trig_diff_matrix(n: int) -> np.ndarray:
    """Spectral differentiation on n equispaced nodes (n even); depends only
    on node differences, so any grid offset shares the same matrix."""
    if n % 2 != 0:
        raise ValueError(f"spectral differentiation needs an even count, got {n}")
    i = np.arange(n)
    diff = i[:, None] - i[None, :]
    with np.errstate(divide="ignore"):
        mat = 0.5 * (-1.0) ** diff / np.tan(0.5 * diff * (_TWO_PI / n))
    np.fill_diagonal(mat, 0.0)
    return mat


def _pairwise(points_row, points_col):
    dx = points_row[:, None, :] - points_col[None, :, :]
    r = np.hypot(dx[..., 0], dx[..., 1])
    return dx, r


def _kernel_fields(s, r):
    """Kernel value, radial derivative and log-split factors at matrix r."""
    flat = r.ravel()
    g = specfun.green_kernel(s, flat).reshape(r.shape)
    dg = specfun.green_radial_derivative(s, flat).reshape(r.shape)
    i0f, wi1f = specfun._log_split_pair(s, flat)
    return g, dg, i0f.reshape(r.shape), wi1f.reshape(r.shape)


# ---------------------------------------------------------------------------
# closed-curve assembly
# ---------------------------------------------------------------------------

def _assemble_closed(s, grid):
    n = grid.n_nodes
    N = grid.order
    h = np.pi / N
    w = complex(s.w)
    jac = grid.jacobians
    nu = grid.normals

    dx, r = _pairwise(grid.points, grid.points)
    np.fill_diagonal(r, 1.0)  # placeholder, diagonals overwritten below
    g, dg, i0f, wi1f = _kernel_fields(s, r)
    np.fill_diagonal(i0f, 1.0)  # I0(0) = 1
    np.fill_diagonal(wi1f, 0.0)  # w I1(0) = 0

    idx = np.arange(n)
    offset = (idx[:, None] - idx[None, :]) % n
    rmat = log_quadrature_weights(N)[offset]

    tdiff = grid.t[:, None] - grid.t[None, :]
    lmat = np.zeros((n, n))
    off = ~np.eye(n, dtype=bool)
    lmat[off] = np.log(4.0 * np.sin(0.5 * tdiff[off]) ** 2)

    dknu_col = np.einsum("ijc,jc->ij", dx, nu) / r
    dknu_row = np.einsum("ijc,ic->ij", dx, nu) / r
    np.fill_diagonal(dknu_col, 0.0)
    np.fill_diagonal(dknu_row, 0.0)

    jcol = jac[None, :]
    log_diag = -(1.0 / _TWO_PI) * (EULER_GAMMA + np.log(w * jac / 2.0))
    curv_diag = -grid.curvature * jac / _FOUR_PI

    # single layer
    a = -(1.0 / _FOUR_PI) * i0f * jcol
    b = g * jcol - a * lmat
    np.fill_diagonal(b, log_diag * jac)
    V = rmat * a + h * b

    # double layer
    a = (1.0 / _FOUR_PI) * wi1f * dknu_col * jcol
    b = -dg * dknu_col * jcol - a * lmat
    np.fill_diagonal(b, curv_diag)
    K = rmat * a + h * b

    # adjoint double layer
    a = -(1.0 / _FOUR_PI) * wi1f * dknu_row * jcol
    b = dg * dknu_row * jcol - a * lmat
    np.fill_diagonal(b, curv_diag)
    Kp = rmat * a + h * b

    # hypersingular via Maue: parameter-free single layer and the
    # normal-weighted single layer
    a0 = -(1.0 / _FOUR_PI) * i0f
    b0 = g - a0 * lmat
    np.fill_diagonal(b0, log_diag)
    v0 = rmat * a0 + h * b0

    nun = nu @ nu.T
    a = -(1.0 / _FOUR_PI) * i0f * nun * jcol
    b = g * nun * jcol - a * lmat
    np.fill_diagonal(b, log_diag * jac)
    vnn = rmat * a + h * b

    D = trig_diff_matrix(n)
    T = (D @ v0 @ D) / jac[:, None] - (w * w) * vnn
    return V, K, Kp, T


# ---------------------------------------------------------------------------
# arc assembly
# ---------------------------------------------------------------------------

def _arc_fold_matrices(N):
    rvec = log_quadrature_weights(N)
    i = np.arange(N)
    rminus = rvec[(i[:, None] - i[None, :]) % (2 * N)]
    rplus = rvec[(i[:, None] + i[None, :] + 1) % (2 * N)]
    return rminus + rplus


def _arc_extension_diffs(N):
    d2 = trig_diff_matrix(2 * N)
    mirror = 2 * N - 1 - np.arange(N)
    block = d2[:N, :N]
    mirrored = d2[:N, mirror]
    return block + mirrored, block - mirrored  # even-class, odd-class


def _assemble_arc(s, grid):
    n = grid.n_nodes
    N = grid.order
    h = np.pi / N
    w = complex(s.w)
    jac = grid.jacobians
    nu = grid.normals
    cpr = grid.s_jacobian
    dt = grid.t1 - grid.t0

    dx, r = _pairwise(grid.points, grid.points)
    np.fill_diagonal(r, 1.0)
    g, dg, i0f, wi1f = _kernel_fields(s, r)
    np.fill_diagonal(i0f, 1.0)
    np.fill_diagonal(wi1f, 0.0)

    rfold = _arc_fold_matrices(N)

    cs = np.cos(grid.s)
    dcos = cs[None, :] - cs[:, None]
    lmat = np.zeros((n, n))
    off = ~np.eye(n, dtype=bool)
    lmat[off] = np.log(4.0 * dcos[off] ** 2)

    dknu_col = np.einsum("ijc,jc->ij", dx, nu) / r
    dknu_row = np.einsum("ijc,ic->ij", dx, nu) / r
    np.fill_diagonal(dknu_col, 0.0)
    np.fill_diagonal(dknu_row, 0.0)

    jc = (jac * cpr)[None, :]  # parameter Jacobian times cosine Jacobian
    log_diag = -(1.0 / _TWO_PI) * (EULER_GAMMA + np.log(w * jac * dt / 8.0))
    curv_diag = -grid.curvature * jac * cpr / _FOUR_PI

    a = -(1.0 / _FOUR_PI) * i0f * jc
    b = g * jc - a * lmat
    np.fill_diagonal(b, log_diag * jac * cpr)
    V = rfold * a + h * b

    a = (1.0 / _FOUR_PI) * wi1f * dknu_col * jc
    b = -dg * dknu_col * jc - a * lmat
    np.fill_diagonal(b, curv_diag)
    K = rfold * a + h * b

    a = -(1.0 / _FOUR_PI) * wi1f * dknu_row * jc
    b = dg * dknu_row * jc - a * lmat
    np.fill_diagonal(b, curv_diag)
    Kp = rfold * a + h * b

    a0 = -(1.0 / _FOUR_PI) * i0f
    b0 = g - a0 * lmat
    np.fill_diagonal(b0, log_diag)
    v0 = rfold * a0 + h * b0

    nun = nu @ nu.T
    a = -(1.0 / _FOUR_PI) * i0f * nun * jc
    b = g * nun * jc - a * lmat
    np.fill_diagonal(b, log_diag * jac * cpr)
    vnn = rfold * a + h * b

    d_even, d_odd = _arc_extension_diffs(N)
    T = (d_even @ v0 @ d_odd) / (jac * cpr)[:, None] - (w * w) * vnn
    return V, K, Kp, T


def assemble(s: SpectralParameter, grid: BoundaryGrid) -> LayerOperatorSet:
    """Assemble the four boundary operators on one grid."""
    if grid.is_closed:
        V, K, Kp, T = _assemble_closed(s, grid)
    else:
        V, K, Kp, T = _assemble_arc(s, grid)
    return LayerOperatorSet(s=s, grid_row=grid, grid_col=grid, V=V, K=K, Kp=Kp, T=T)


# ---------------------------------------------------------------------------
# potentials and far fields
# ---------------------------------------------------------------------------

def exclusion_mask(grid: BoundaryGrid, points) -> np.ndarray:
    """True where a field point is within EXCLUSION_FACTOR node spacings of
    the boundary, i.e. where plain quadrature of the potential degrades."""
    points = np.atleast_2d(np.asarray(points, float))
    _, r = _pairwise(points, grid.points)
    return np.min(r, axis=1) < EXCLUSION_FACTOR * grid.spacing


def eval_potential(s: SpectralParameter, grid: BoundaryGrid, phi, psi, points):
    """Combined single/double layer potential at exterior field points.

    Values inside the near-boundary exclusion band are still computed (and
    a warning counts them); callers that need reliability flags should pair
    this with ``exclusion_mask``.
    """
    points = np.atleast_2d(np.asarray(points, float))
    phi = np.zeros(grid.n_nodes) if phi is None else np.asarray(phi)
    psi = np.zeros(grid.n_nodes) if psi is None else np.asarray(psi)

    n_close = int(np.count_nonzero(exclusion_mask(grid, points)))
    if n_close:
        logger.warning(
            "%d field point(s) lie within %.1f node spacings of the "
            "boundary; quadrature accuracy degrades there",
            n_close,
            EXCLUSION_FACTOR,
        )

    dx, r = _pairwise(points, grid.points)
    r = np.maximum(r, 1e-14)
    flat = r.ravel()
    g = specfun.green_kernel(s, flat).reshape(r.shape)
    dgk = specfun.green_radial_derivative(s, flat).reshape(r.shape)
    dl = -dgk * np.einsum("ijc,jc->ij", dx, grid.normals) / r
    wq = grid.density_weights * grid.jacobians
    return g @ (wq * phi) + dl @ (wq * psi)


def eval_potential_gradient(s: SpectralParameter, grid: BoundaryGrid, phi, psi, points):
    """Gradient of the combined layer potential at off-boundary points.

    The second radial kernel derivative is eliminated through the radial
    ODE G'' = w^2 G - G'/r, so only the assembled kernel pair is needed.
    """
    points = np.atleast_2d(np.asarray(points, float))
    phi = np.zeros(grid.n_nodes) if phi is None else np.asarray(phi)
    psi = np.zeros(grid.n_nodes) if psi is None else np.asarray(psi)
    w2 = complex(s.w) ** 2
    dx, r = _pairwise(points, grid.points)
    r = np.maximum(r, 1e-14)
    flat = r.ravel()
    g = specfun.green_kernel(s, flat).reshape(r.shape)
    dg = specfun.green_radial_derivative(s, flat).reshape(r.shape)
    e = dx / r[..., None]  # unit vectors source -> field point
    enu = np.einsum("ijc,jc->ij", e, grid.normals)
    wq = grid.density_weights * grid.jacobians
    # single layer: grad = G'(r) e
    grad = np.einsum("ij,ijc->ic", dg * (wq * phi)[None, :], e)
    # double layer kernel -G'(r) (e . nu): grad =
    #   -[(w^2 G - G'/r)(e . nu) e + G' (nu - (e . nu) e)/r]
    ddg = w2 * g - dg / r
    coef = (wq * psi)[None, :]
    grad -= np.einsum("ij,ijc->ic", ddg * enu * coef, e)
    grad -= np.einsum("ij,jc->ic", dg / r * coef, grid.normals)
    grad += np.einsum("ij,ijc->ic", dg / r * enu * coef, e)
    return grad


def far_field_row(k: float, grid: BoundaryGrid, phi, psi, directions):
    """Far-field pattern of the combined layer representation.

    directions: (M, 2) unit vectors. Returns the pattern F with
    F(xi) = sum_j w_j |x'_j| e^{-i k xi . x_j} (phi_j - i k (xi . nu_j) psi_j),
    the k-dependent cylindrical spreading constant kept outside.
    """
    directions = np.atleast_2d(np.asarray(directions, float))
    phi = np.zeros(grid.n_nodes) if phi is None else np.asarray(phi)
    psi = np.zeros(grid.n_nodes) if psi is None else np.asarray(psi)
    phase = np.exp(-1j * k * directions @ grid.points.T)  # (M, n)
    dirnu = directions @ grid.normals.T  # (M, n)
    wq = grid.density_weights * grid.jacobians
    return phase @ (wq * phi) - 1j * k * (phase * dirnu) @ (wq * psi)
