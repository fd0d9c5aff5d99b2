from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from weyl_scatter.geometry import (
    ArcSpec,
    BoundaryGrid,
    Circle,
    Ellipse,
    Kite,
    TabulatedSmooth,
    build_arc_grid,
    build_grid,
)


def _signed_area(grid: BoundaryGrid) -> float:
    x = grid.points
    tang = np.stack([-grid.normals[:, 1], grid.normals[:, 0]], axis=1)
    integrand = 0.5 * (x[:, 0] * tang[:, 1] - x[:, 1] * tang[:, 0])
    return float(np.sum(grid.weights * grid.jacobians * integrand))


# ---------------------------------------------------------------------------
# circle: everything is known in closed form
# ---------------------------------------------------------------------------

def test_circle_grid_exact_quantities():
    r = 1.7
    grid = build_grid(Circle(radius=r, center=(0.3, -0.4)), 32)
    assert grid.n_nodes == 64
    assert grid.is_closed
    np.testing.assert_allclose(grid.jacobians, r, rtol=1e-14)
    np.testing.assert_allclose(grid.curvature, 1.0 / r, rtol=1e-13)
    radial = grid.points - np.array([0.3, -0.4])
    np.testing.assert_allclose(np.linalg.norm(radial, axis=1), r, rtol=1e-14)
    # outward unit normals along the radial direction
    np.testing.assert_allclose(grid.normals, radial / r, atol=1e-14)
    assert abs(np.sum(grid.weights * grid.jacobians) - 2 * np.pi * r) <= 1e-13
    assert abs(_signed_area(grid) - np.pi * r * r) <= 1e-12


def test_trapezoid_weights_and_spacing():
    grid = build_grid(Circle(), 16)
    np.testing.assert_allclose(grid.weights, 2 * np.pi / 32, rtol=0)
    # spacing reports a representative node separation: on the unit circle
    # adjacent nodes are a chord 2 sin(pi/32) apart
    assert grid.spacing == pytest.approx(2 * np.sin(np.pi / 32), rel=1e-6)
    np.testing.assert_allclose(np.diff(grid.t), 2 * np.pi / 32, rtol=1e-14)


def test_ellipse_circumference_and_curvature():
    grid = build_grid(Ellipse(2.0, 1.0), 128)
    length = float(np.sum(grid.weights * grid.jacobians))
    assert abs(length - oracles.ELLIPSE_CIRCUMFERENCE_2_1) <= 1e-12
    # at t=0 the ellipse has curvature a/b^2
    assert grid.t[0] == 0.0
    assert grid.curvature[0] == pytest.approx(2.0 / 1.0**2, rel=1e-12)
    # quarter turn hits the minor-axis end where curvature is b/a^2
    i = np.argmin(np.abs(grid.t - np.pi / 2))
    assert grid.curvature[i] == pytest.approx(1.0 / 4.0, rel=1e-10)


def test_kite_grid_consistency():
    grid = build_grid(Kite(), 64)
    # the centered kite starts at (1, 0)
    np.testing.assert_allclose(grid.points[0], [1.0, 0.0], atol=1e-14)
    assert _signed_area(grid) > 0.0
    assert np.any(grid.curvature < 0.0) or np.all(grid.curvature > 0)
    np.testing.assert_allclose(np.linalg.norm(grid.normals, axis=1), 1.0, rtol=1e-13)


def test_orientation_rejected():
    bad = TabulatedSmooth(
        cos_x=(0.0, 1.0), sin_x=(0.0, 0.0), cos_y=(0.0, 0.0), sin_y=(0.0, -1.0)
    )  # clockwise circle
    with pytest.raises(ValueError):
        build_grid(bad, 16)


def test_node_count_validation():
    c = Circle()
    for bad in (7, 0, -4, 9):
        with pytest.raises(ValueError):
            build_grid(c, bad)
    with pytest.raises(ValueError):
        build_arc_grid(ArcSpec(curve=c, t0=0.0, t1=np.pi), 5)


def test_curve_parameter_validation():
    with pytest.raises(ValueError):
        Circle(radius=0.0).validate()
    with pytest.raises(ValueError):
        build_grid(Circle(radius=-1.0), 16)
    with pytest.raises(ValueError):
        Ellipse(2.0, 0.0).validate()
    with pytest.raises(ValueError):
        ArcSpec(curve=Circle(), t0=1.0, t1=1.0).validate()
    # arcs must be proper subsets of the parent curve
    with pytest.raises(ValueError):
        build_arc_grid(ArcSpec(curve=Circle(), t0=0.0, t1=7.0), 16)


# ---------------------------------------------------------------------------
# arcs: cosine-graded nodes and endpoint behaviour
# ---------------------------------------------------------------------------

def test_arc_grid_basic_structure():
    spec = ArcSpec(curve=Circle(), t0=0.0, t1=np.pi)
    grid = build_arc_grid(spec, 32)
    assert grid.kind == "arc"
    assert not grid.is_closed
    assert grid.n_nodes == 32
    assert np.all(np.diff(grid.t) > 0)
    assert grid.t[0] > 0.0 and grid.t[-1] < np.pi
    # nodes cluster toward the endpoints: first gap much smaller than central
    gaps = np.diff(grid.t)
    assert gaps[0] < 0.3 * np.max(gaps)


def test_arc_endpoint_clustering_rate():
    spec = ArcSpec(curve=Circle(), t0=0.0, t1=np.pi)
    d = []
    for n in (32, 64, 128):
        grid = build_arc_grid(spec, n)
        d.append(grid.t[0])
    # distance of the first node from the endpoint decays like 1/N^2
    assert d[0] / d[1] == pytest.approx(4.0, rel=0.1)
    assert d[1] / d[2] == pytest.approx(4.0, rel=0.1)


def test_arc_smooth_weights_are_spectral():
    # `weights` integrate smooth functions of t spectrally on the graded nodes
    spec = ArcSpec(curve=Circle(), t0=0.0, t1=np.pi)
    grid = build_arc_grid(spec, 64)
    val = float(np.sum(grid.weights * np.exp(np.cos(grid.t))))
    assert abs(val - oracles.ARC_EXP_COS_INTEGRAL) <= 1e-13
    length = float(
        np.sum(
            build_arc_grid(ArcSpec(Circle(radius=2.0), 0.5, 0.5 + np.pi), 48).weights
        )
        * 2.0
    )
    assert abs(length - 2.0 * np.pi) <= 1e-12


def test_arc_density_weights_second_order_on_smooth():
    # the density pairing rule is only second order for smooth integrands:
    # its spectral accuracy is reserved for edge-singular densities
    spec = ArcSpec(curve=Circle(), t0=0.0, t1=np.pi)
    errs = []
    for n in (64, 128, 256):
        grid = build_arc_grid(spec, n)
        val = float(np.sum(grid.density_weights * np.exp(np.cos(grid.t))))
        errs.append(abs(val - oracles.ARC_EXP_COS_INTEGRAL))
    assert errs[0] <= 1e-3
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.05)


def test_arc_density_weights_exact_for_edge_singular_class():
    # densities carrying the inverse square root edge factor are the
    # natural class: integral of 1/sqrt((t - t0)(t1 - t)) dt equals pi
    # for any interval, and the rule reproduces it to machine precision
    t0, t1 = 0.5, 0.5 + np.pi
    spec = ArcSpec(curve=Circle(radius=2.0), t0=t0, t1=t1)
    for n in (16, 64):
        grid = build_arc_grid(spec, n)
        f = 1.0 / np.sqrt((grid.t - t0) * (t1 - grid.t))
        val = float(np.sum(grid.density_weights * f))
        assert abs(val - np.pi) <= 1e-13


# ---------------------------------------------------------------------------
# tabulated curves
# ---------------------------------------------------------------------------

def test_tabulated_round_trip(tmp_path):
    path = tmp_path / "curve.txt"
    # rows are Fourier modes m = 0, 1, 2
    rows = np.array(
        [
            [0.1, 0.0, -0.05, 0.0],
            [1.4, 0.0, 0.0, 1.0],
            [0.05, 0.0, 0.02, 0.0],
        ]
    )
    np.savetxt(path, rows)
    curve = TabulatedSmooth.from_file(path)
    direct = TabulatedSmooth(
        cos_x=tuple(rows[:, 0]),
        sin_x=tuple(rows[:, 1]),
        cos_y=tuple(rows[:, 2]),
        sin_y=tuple(rows[:, 3]),
    )
    t = np.linspace(0, 2 * np.pi, 17)
    np.testing.assert_allclose(curve.point(t), direct.point(t), atol=1e-15)
    ga = build_grid(curve, 16)
    gb = build_grid(direct, 16)
    np.testing.assert_allclose(ga.points, gb.points, atol=1e-15)


def test_tabulated_file_validation(tmp_path):
    path = tmp_path / "bad.txt"
    np.savetxt(path, np.ones((3, 3)))
    with pytest.raises(ValueError):
        TabulatedSmooth.from_file(path)


def test_tabulated_matches_circle():
    curve = TabulatedSmooth(
        cos_x=(0.0, 1.0), sin_x=(0.0, 0.0), cos_y=(0.0, 0.0), sin_y=(0.0, 1.0)
    )
    ga = build_grid(curve, 24)
    gb = build_grid(Circle(), 24)
    np.testing.assert_allclose(ga.points, gb.points, atol=1e-14)
    np.testing.assert_allclose(ga.curvature, gb.curvature, atol=1e-12)


# ---------------------------------------------------------------------------
# invariants on a family of smooth curves
# ---------------------------------------------------------------------------

@given(
    a=st.floats(min_value=0.5, max_value=3.0, allow_nan=False),
    b=st.floats(min_value=0.5, max_value=3.0, allow_nan=False),
)
@settings(max_examples=25, deadline=None)
def test_ellipse_grid_invariants(a, b):
    grid = build_grid(Ellipse(a, b), 24)
    np.testing.assert_allclose(np.linalg.norm(grid.normals, axis=1), 1.0, rtol=1e-12)
    tang = grid.curve.derivative(grid.t)
    dots = np.sum(grid.normals * tang, axis=1)
    assert np.max(np.abs(dots)) <= 1e-11 * max(a, b)
    assert _signed_area(grid) == pytest.approx(np.pi * a * b, rel=1e-6)
    assert np.all(grid.jacobians > 0)
