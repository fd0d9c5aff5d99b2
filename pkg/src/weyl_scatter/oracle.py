"""Independent reference solutions for validation.

Everything here is computed from closed-form separation of variables or
direct adaptive quadrature, never from the production operator assembly,
so agreement between the two paths is meaningful evidence of correctness.

Circle references use the rotational diagonalization of the boundary
operators: on a circle of radius R every operator acts on the angular mode
e^{i n t} by a scalar multiplier, and scattering by any of the supported
boundary conditions reduces to one scalar equation per mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .specfun import Branch, LimitBranch, OffAxis, SpectralParameter
from .weyl import (
    BoundaryCondition,
    Delta,
    DeltaPrime,
    Dirichlet,
    Neumann,
    Robin,
)

__all__ = [
    "CircleSymbols",
    "circle_symbols",
    "mie_coefficients",
    "mie_scattering_kernel",
    "default_mode_count",
    "brute_force_single_layer",
]


@dataclass(frozen=True)
class CircleSymbols:
    """Angular-mode multipliers of the boundary operators on a circle."""

    v: complex
    k: complex | None
    t: complex | None


def _jh_data(n_max: int, a: float):
    """J_n, J'_n, H1_n, H1'_n for n = 0..n_max at argument a."""
    js = specfun._bessel_j_all(n_max, np.asarray([a]))[:, 0]
    ys = specfun._bessel_y_all(n_max, np.asarray([a]))[:, 0]
    hs = js + 1j * ys
    n = np.arange(n_max + 1)
    jm1 = np.concatenate([[-js[1]], js[:-1]])  # J_{n-1} with J_{-1} = -J_1
    ym1 = np.concatenate([[-ys[1]], ys[:-1]])
    jp = jm1 - (n / a) * js
    yp = ym1 - (n / a) * ys
    hp = jp + 1j * yp
    return js, jp, hs, hp


def circle_symbols(s: SpectralParameter, radius: float, n: int) -> CircleSymbols:
    """Mode-n multipliers of V, K (= Kp) and T on a circle of given radius.

    Off-axis points provide the single-layer multiplier for n in {0, 1}
    only; limit points provide all three for any order.
    """
    n = abs(int(n))
    if isinstance(s, OffAxis):
        if n > 1:
            raise ValueError("off-axis circle symbols are tabulated for n <= 1")
        w = s.w
        i_n = specfun._mod_i(n, np.asarray([w * radius]))[0]
        k_n = specfun.mod_bessel_k(n, w * radius)
        return CircleSymbols(v=radius * i_n * k_n, k=None, t=None)
    k = s.k
    a = k * radius
    js, jp, hs, hp = _jh_data(max(n, 1), a)
    pref = 1j * math.pi * radius / 2.0
    v = pref * js[n] * hs[n]
    kk = (pref * k / 2.0) * (jp[n] * hs[n] + js[n] * hp[n])
    t = pref * k * k * jp[n] * hp[n]
    if s.branch is Branch.PLUS:
        return CircleSymbols(v=np.conj(v), k=np.conj(kk), t=np.conj(t))
    return CircleSymbols(v=v, k=kk, t=t)


def default_mode_count(k: float, radius: float) -> int:
    """Angular truncation order for circle series at wavenumber k."""
    return max(32, int(math.ceil(2.0 * k * radius)) + 16)


def _require_constant(value, name: str) -> float:
    if callable(value):
        raise ValueError(f"circle references need a constant {name}")
    return float(value)


def mie_coefficients(
    bc: BoundaryCondition, k: float, radius: float, n_max: int
) -> np.ndarray:
    """Outgoing-mode coefficients c_n, n = -n_max..n_max, for a plane wave
    scattering off a circle of given radius (outgoing limit branch).

    The incident mode i^n J_n(kr) e^{i n (theta - theta_in)} picks up the
    scattered part i^n c_n H1_n(kr) e^{i n (theta - theta_in)}.
    """
    a = k * radius
    js, jp, hs, hp = _jh_data(n_max, a)
    if isinstance(bc, Dirichlet):
        c = -js / hs
    elif isinstance(bc, Neumann):
        c = -jp / hp
    elif isinstance(bc, Robin):
        b = _require_constant(bc.b_plus, "b_plus")
        c = -(k * jp - b * js) / (k * hp - b * hs)
    elif isinstance(bc, Delta):
        alpha = _require_constant(bc.alpha, "alpha")
        v_hat = (1j * math.pi * radius / 2.0) * js * hs
        c = -alpha * (1j * math.pi * radius / 2.0) * js**2 / (1.0 + alpha * v_hat)
    elif isinstance(bc, DeltaPrime):
        beta = _require_constant(bc.beta, "beta")
        t_hat = (1j * math.pi * radius * k * k / 2.0) * jp * hp
        c = beta * (1j * math.pi * radius * k * k / 2.0) * jp**2 / (1.0 - beta * t_hat)
    else:
        raise TypeError(f"unsupported boundary condition {bc!r}")
    return np.concatenate([c[:0:-1], c])  # even in n


def mie_scattering_kernel(
    bc: BoundaryCondition,
    k: float,
    radius: float,
    thetas_out,
    thetas_in,
    n_max: int | None = None,
) -> np.ndarray:
    """Reference angular kernel s[m_out, m_in] for circle scattering."""
    if n_max is None:
        n_max = default_mode_count(k, radius)
    c = mie_coefficients(bc, k, radius, n_max)
    ns = np.arange(-n_max, n_max + 1)
    thetas_out = np.atleast_1d(np.asarray(thetas_out, float))
    thetas_in = np.atleast_1d(np.asarray(thetas_in, float))
    phase_out = np.exp(1j * np.outer(thetas_out, ns))  # (Mo, n)
    phase_in = np.exp(-1j * np.outer(ns, thetas_in))  # (n, Mi)
    return -(1.0 / math.pi) * (phase_out * c) @ phase_in


# ---------------------------------------------------------------------------
# direct quadrature reference for the single-layer trace
# ---------------------------------------------------------------------------

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(16)


def _graded_panels(lo: float, hi: float, levels: int = 44):
    """Panel edges on [lo, hi] refined geometrically toward both endpoints.

    The innermost slivers of width (hi-lo)/2^(levels+1) at each end are left
    uncovered; with an integrable log singularity there this truncates at
    O(delta log delta)."""
    mid = 0.5 * (lo + hi)
    span = mid - lo
    fracs = 0.5 ** np.arange(levels, -1, -1.0)  # 2^-levels .. 1
    left = lo + span * fracs
    right = hi - span * fracs[::-1]
    edges = np.unique(np.concatenate([left, right]))
    # cap the panel width so 16-point Gauss resolves oscillatory kernels
    max_width = 0.1
    refined = [edges[:1]]
    for a, b in zip(edges[:-1], edges[1:]):
        pieces = max(1, int(math.ceil((b - a) / max_width)))
        refined.append(np.linspace(a, b, pieces + 1)[1:])
    return np.concatenate(refined)


def brute_force_single_layer(
    s: SpectralParameter,
    curve,
    density,
    t_targets,
    levels: int = 44,
) -> np.ndarray:
    """Single-layer trace (V density)(t) by graded-panel Gauss quadrature.

    density: callable of the curve parameter. The integrand's logarithmic
    singularity at tau = t is resolved by panels shrinking geometrically
    toward the target from both sides; the leftover endpoint gap
    contributes O(delta log delta) with delta ~ 2 pi 2^{-levels}.
    """
    from .geometry import _frame  # local import: geometry stays oracle-free

    t_targets = np.atleast_1d(np.asarray(t_targets, float))
    out = np.empty(t_targets.shape, complex)
    for it, t0 in enumerate(t_targets):
        x0, _, _, _ = _frame(curve, np.asarray([t0]))
        edges = _graded_panels(t0, t0 + 2.0 * math.pi, levels)
        a = edges[:-1]
        b = edges[1:]
        half = 0.5 * (b - a)
        taus = (0.5 * (a + b))[:, None] + half[:, None] * _GAUSS_X[None, :]
        wq = half[:, None] * _GAUSS_W[None, :]
        taus_flat = taus.ravel()
        pts, jac, _, _ = _frame(curve, taus_flat)
        r = np.hypot(pts[:, 0] - x0[0, 0], pts[:, 1] - x0[0, 1])
        r = np.maximum(r, 1e-300)
        vals = specfun.green_kernel(s, r) * np.asarray(density(taus_flat)) * jac
        out[it] = np.sum(vals * wq.ravel())
    return out if out.shape != (1,) else out[0]
