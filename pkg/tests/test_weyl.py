from __future__ import annotations

import numpy as np
import pytest

from weyl_scatter.geometry import Circle, Kite, build_grid
from weyl_scatter.layerops import assemble, far_field_row
from weyl_scatter.oracle import mie_scattering_kernel
from weyl_scatter.specfun import Branch, LimitBranch
from weyl_scatter.weyl import (
    Delta,
    DeltaPrime,
    Dirichlet,
    Neumann,
    NumericalError,
    Robin,
    WeylSystem,
    assemble_weyl,
    trace_plane_wave,
)

ALL_BCS = (
    Dirichlet(),
    Neumann(),
    Robin(b_minus=-1.0, b_plus=1.0),
    Delta(alpha=2.0),
    DeltaPrime(beta=2.0),
)


def _minus(k):
    return LimitBranch(k=k, branch=Branch.MINUS)


def _solve_far_field(bc, k, grid, theta_in, theta_out):
    sys = assemble_weyl(bc, assemble(_minus(k), grid))
    d = np.array([np.cos(theta_in), np.sin(theta_in)])
    g0, g1 = trace_plane_wave(k, d, grid)
    dens = sys.solve(g0, g1)
    xi = np.array([[np.cos(theta_out), np.sin(theta_out)]])
    return far_field_row(k, grid, dens.phi, dens.psi, xi)[0]


# ---------------------------------------------------------------------------
# separation-of-variables cross-check on the circle
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("bc", ALL_BCS, ids=lambda b: b.describe())
def test_circle_far_field_matches_mie(bc):
    k = 2.0
    grid = build_grid(Circle(), 64)
    thetas_out = np.array([0.0, 1.1, 2.9])
    theta_in = 0.4
    ref = mie_scattering_kernel(bc, k, 1.0, thetas_out, np.array([theta_in]))[:, 0]
    scale = max(np.max(np.abs(ref)), 1e-3)
    for i, th in enumerate(thetas_out):
        # far_field_row returns the raw radiation coefficient; the angular
        # kernel carries an extra -(i/4 pi)
        got = -0.25j * _solve_far_field(bc, k, grid, theta_in, th) / np.pi
        assert abs(got - ref[i]) <= 1e-10 * scale


# ---------------------------------------------------------------------------
# scaled vs unscaled block forms
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("bc", ALL_BCS, ids=lambda b: b.describe())
def test_unscaled_route_matches_production(bc):
    grid = build_grid(Kite(), 32)
    sys = assemble_weyl(bc, assemble(_minus(2.0), grid))
    g0, g1 = trace_plane_wave(2.0, np.array([1.0, 0.0]), grid)
    dens = sys.solve(g0, g1)
    m = sys.unscaled_matrix()
    n = grid.n_nodes
    if bc.selector == "phi":
        got = np.linalg.solve(m, g0) if m.shape == (n, n) else None
        np.testing.assert_allclose(got, dens.phi, atol=1e-10)
    elif bc.selector == "psi":
        got = np.linalg.solve(m, g1)
        np.testing.assert_allclose(got, dens.psi, atol=1e-10)
    else:
        rhs = np.concatenate([g0, g1])
        got = np.linalg.solve(m, rhs)
        np.testing.assert_allclose(got[:n], dens.phi, atol=1e-10)
        np.testing.assert_allclose(got[n:], dens.psi, atol=1e-10)


def test_zero_strength_interactions_scatter_nothing():
    grid = build_grid(Kite(), 32)
    g0, g1 = trace_plane_wave(2.0, np.array([0.6, 0.8]), grid)
    for bc in (Delta(alpha=0.0), DeltaPrime(beta=0.0)):
        sys = assemble_weyl(bc, assemble(_minus(2.0), grid))
        dens = sys.solve(g0, g1)
        assert np.max(np.abs(dens.phi)) == 0.0
        assert np.max(np.abs(dens.psi)) == 0.0
        with pytest.raises(ValueError):
            sys.unscaled_matrix()


def test_callable_coefficients_match_constant():
    grid = build_grid(Circle(), 32)
    ops = assemble(_minus(2.0), grid)
    g0, g1 = trace_plane_wave(2.0, np.array([1.0, 0.0]), grid)
    pairs = [
        (Delta(alpha=2.0), Delta(alpha=lambda t: 2.0 + 0.0 * t)),
        (
            Robin(b_minus=-1.0, b_plus=1.0),
            Robin(b_minus=lambda t: -1.0 + 0.0 * t, b_plus=lambda t: 1.0 + 0.0 * t),
        ),
    ]
    for const_bc, call_bc in pairs:
        a = assemble_weyl(const_bc, ops).solve(g0, g1)
        b = assemble_weyl(call_bc, ops).solve(g0, g1)
        np.testing.assert_allclose(a.phi, b.phi, atol=1e-13)
        np.testing.assert_allclose(a.psi, b.psi, atol=1e-13)


def test_variable_coefficient_changes_answer():
    grid = build_grid(Circle(), 32)
    ops = assemble(_minus(2.0), grid)
    g0, g1 = trace_plane_wave(2.0, np.array([1.0, 0.0]), grid)
    a = assemble_weyl(Delta(alpha=2.0), ops).solve(g0, g1)
    b = assemble_weyl(Delta(alpha=lambda t: 2.0 + np.sin(t) ** 2), ops).solve(g0, g1)
    assert np.max(np.abs(a.phi - b.phi)) > 1e-3


# ---------------------------------------------------------------------------
# validation and failure modes
# ---------------------------------------------------------------------------

def test_parameter_validation():
    grid = build_grid(Circle(), 16)
    ops = assemble(_minus(2.0), grid)
    with pytest.raises(ValueError):
        assemble_weyl(Delta(alpha=-1.0), ops)
    with pytest.raises(ValueError):
        assemble_weyl(Robin(b_minus=1.0, b_plus=1.0), ops)
    with pytest.raises(ValueError):
        assemble_weyl(Delta(alpha=lambda t: np.full_like(t, np.nan)), ops)


def test_interior_resonance_raises():
    # first Dirichlet eigenvalue of the unit disk: the boundary system
    # becomes numerically singular and the solver must refuse
    k = 2.404825557695773
    grid = build_grid(Circle(), 64)
    sys = assemble_weyl(Dirichlet(), assemble(_minus(k), grid))
    g0, g1 = trace_plane_wave(k, np.array([1.0, 0.0]), grid)
    with pytest.raises(NumericalError):
        sys.solve(g0, g1)


def test_cond_estimate_brackets_true_condition():
    grid = build_grid(Kite(), 32)
    for bc in ALL_BCS:
        sys = assemble_weyl(bc, assemble(_minus(2.0), grid))
        est = sys.cond_estimate()
        exact = np.linalg.norm(sys.matrix, 1) * np.linalg.norm(
            np.linalg.inv(sys.matrix), 1
        )
        assert est <= exact * (1.0 + 1e-8)
        assert est >= exact / 100.0


# ---------------------------------------------------------------------------
# shapes and traces
# ---------------------------------------------------------------------------

def test_trace_plane_wave_values():
    grid = build_grid(Circle(radius=1.5, center=(0.2, -0.1)), 24)
    k = 1.3
    d = np.array([0.6, 0.8])
    g0, g1 = trace_plane_wave(k, d, grid)
    ref0 = np.exp(1j * k * grid.points @ d)
    np.testing.assert_allclose(g0, ref0, atol=1e-15)
    np.testing.assert_allclose(g1, 1j * k * (grid.normals @ d) * ref0, atol=1e-15)
    assert np.max(np.abs(np.abs(g0) - 1.0)) <= 1e-14


def test_batched_solve_matches_loop():
    grid = build_grid(Kite(), 32)
    sys = assemble_weyl(Robin(b_minus=-1.0, b_plus=1.0), assemble(_minus(2.0), grid))
    thetas = np.array([0.0, 1.0, 2.0])
    g0s, g1s = [], []
    for th in thetas:
        g0, g1 = trace_plane_wave(2.0, np.array([np.cos(th), np.sin(th)]), grid)
        g0s.append(g0)
        g1s.append(g1)
    batch = sys.solve(np.stack(g0s, axis=1), np.stack(g1s, axis=1))
    assert batch.phi.shape == (grid.n_nodes, 3)
    for j in range(3):
        single = sys.solve(g0s[j], g1s[j])
        np.testing.assert_allclose(batch.phi[:, j], single.phi, atol=1e-13)
        np.testing.assert_allclose(batch.psi[:, j], single.psi, atol=1e-13)


def test_density_selector_zeroes_inactive_component():
    grid = build_grid(Circle(), 16)
    ops = assemble(_minus(2.0), grid)
    g0, g1 = trace_plane_wave(2.0, np.array([1.0, 0.0]), grid)
    dens = assemble_weyl(Dirichlet(), ops).solve(g0, g1)
    assert np.max(np.abs(dens.psi)) == 0.0
    assert np.max(np.abs(dens.phi)) > 0.0
    dens = assemble_weyl(Neumann(), ops).solve(g0, g1)
    assert np.max(np.abs(dens.phi)) == 0.0
    assert np.max(np.abs(dens.psi)) > 0.0


def test_describe_names():
    names = {bc.describe() for bc in ALL_BCS}
    assert names == {"dirichlet", "neumann", "robin", "delta", "delta_prime"}
