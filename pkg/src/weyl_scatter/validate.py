"""Built-in consistency checks shared by the CLI and the test suite.

Each check computes one observed number that must stay below its
tolerance. The quick tier runs in well under a minute on a laptop; the
full tier repeats the physics checks at production resolution.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import geometry, layerops, oracle, scattering, weyl
from .specfun import Branch, LimitBranch, OffAxis, bessel_j, bessel_y

__all__ = ["CheckResult", "run_checks", "format_table"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    tolerance: float
    observed: float
    passed: bool
    seconds: float


def _mie_gap(bc, k, N, M) -> float:
    grid = geometry.build_grid(geometry.Circle(radius=1.0), N)
    dg = scattering.DirectionGrid(M)
    kern = scattering.scattering_kernel(bc, k, grid, dg)
    ref = oracle.mie_scattering_kernel(bc, k, 1.0, dg.thetas, dg.thetas)
    return float(np.max(np.abs(kern - ref)) / np.max(np.abs(ref)))


def _unitarity(bc, k, curve, N, M) -> float:
    grid = geometry.build_grid(curve, N)
    return scattering.s_matrix(bc, k, grid, scattering.DirectionGrid(M)).unitarity_residual()


def _dual_gap(bc, k, N, M) -> float:
    grid = geometry.build_grid(geometry.Circle(radius=1.0), N)
    dg = scattering.DirectionGrid(M)
    kd = scattering.scattering_kernel(bc, k, grid, dg, form="direct")
    ka = scattering.scattering_kernel(bc, k, grid, dg, form="adjoint")
    return float(np.max(np.abs(kd - ka)))


def _reciprocity(bc, k, N, M) -> float:
    grid = geometry.build_grid(geometry.Kite(), N)
    dg = scattering.DirectionGrid(M)
    kern = scattering.scattering_kernel(bc, k, grid, dg)
    half = M // 2
    flipped = np.roll(np.roll(kern.T, half, axis=0), half, axis=1)
    return float(np.max(np.abs(kern - flipped)))


def _wronskian() -> float:
    x = np.linspace(0.1, 60.0, 331)
    worst = 0.0
    for n in (0, 1, 2, 7, 19):
        j0, j1 = bessel_j(n, x), bessel_j(n + 1, x)
        y0, y1 = bessel_y(n, x), bessel_y(n + 1, x)
        worst = max(worst, float(np.max(np.abs(j1 * y0 - j0 * y1 - 2.0 / (np.pi * x)))))
    return worst


def _arc_selfconvergence(k=2.0) -> float:
    arc = geometry.ArcSpec(curve=geometry.Circle(radius=1.0), t0=0.0, t1=np.pi)
    s = LimitBranch(k=k, branch=Branch.MINUS)
    d = np.array([np.cos(0.3), np.sin(0.3)])
    dg = scattering.DirectionGrid(16)
    rows = {}
    for N in (64, 128):
        ga = geometry.build_arc_grid(arc, N)
        ops = layerops.assemble(s, ga)
        g0 = np.exp(1j * k * ga.points @ d)
        phi = np.linalg.solve(-ops.V, g0)
        rows[N] = layerops.far_field_row(k, ga, phi, None, dg.vectors)
    return float(np.max(np.abs(rows[64] - rows[128])))


def _lap_order() -> float:
    bc = weyl.Delta(alpha=2.0)
    grid = geometry.build_grid(geometry.Circle(radius=1.0), 64)
    y0 = np.array([2.5, 0.4])
    xs = np.array([[0.2, 2.2], [-1.9, -0.7]])
    lim = scattering.resolvent_kernel(bc, LimitBranch(k=2.0, branch=Branch.MINUS), grid, xs, y0)
    errs = []
    for eps in (1e-1, 1e-2, 1e-3):
        val = scattering.resolvent_kernel(bc, OffAxis(-4.0 - 1j * eps), grid, xs, y0)
        errs.append(np.max(np.abs(val - lim)))
    orders = np.diff(np.log(errs)) / np.log(1e-1)
    return float(np.min(orders))  # must exceed 0.9: checked as 1 - order <= tol

def _strong_coupling(k=2.0) -> float:
    grid = geometry.build_grid(geometry.Kite(), 96)
    dg = scattering.DirectionGrid(16)
    d_gap = np.max(
        np.abs(
            scattering.scattering_kernel(weyl.Delta(alpha=1e4), k, grid, dg)
            - scattering.scattering_kernel(weyl.Dirichlet(), k, grid, dg)
        )
    )
    n_gap = np.max(
        np.abs(
            scattering.scattering_kernel(weyl.DeltaPrime(beta=1e4), k, grid, dg)
            - scattering.scattering_kernel(weyl.Neumann(), k, grid, dg)
        )
    )
    return float(max(d_gap, n_gap))


_ALL_BCS = (
    ("dirichlet", weyl.Dirichlet()),
    ("neumann", weyl.Neumann()),
    ("robin", weyl.Robin(b_minus=1.0, b_plus=-1.0)),
    ("delta", weyl.Delta(alpha=2.0)),
    ("delta_prime", weyl.DeltaPrime(beta=2.0)),
)


def _checks(quick: bool):
    checks: list[tuple[str, float, Callable[[], float]]] = [
        ("circle_reference_dirichlet_k2", 1e-8, lambda: _mie_gap(weyl.Dirichlet(), 2.0, 64, 16)),
        ("circle_reference_delta_k2", 1e-8, lambda: _mie_gap(weyl.Delta(alpha=2.0), 2.0, 64, 16)),
        ("dual_form_neumann_k2", 1e-8, lambda: _dual_gap(weyl.Neumann(), 2.0, 64, 16)),
        ("unitarity_kite_robin_k2", 1e-6, lambda: _unitarity(weyl.Robin(1.0, -1.0), 2.0, geometry.Kite(), 128, 32)),
        ("reciprocity_kite_delta_prime_k2", 1e-6, lambda: _reciprocity(weyl.DeltaPrime(beta=2.0), 2.0, 96, 16)),
        ("bessel_wronskian", 1e-11, _wronskian),
        ("arc_far_field_selfconvergence", 1e-3, _arc_selfconvergence),
        ("limit_absorption_order_gap", 0.1, lambda: 1.0 - _lap_order()),
    ]
    if not quick:
        for kval in (0.5, 2.0, 5.0):
            for name, bc in _ALL_BCS:
                checks.append(
                    (
                        f"circle_reference_{name}_k{kval:g}",
                        1e-8,
                        lambda bc=bc, kval=kval: _mie_gap(bc, kval, 256, 64),
                    )
                )
        for name, bc in _ALL_BCS:
            checks.append(
                (
                    f"unitarity_kite_{name}_k2_full",
                    1e-6,
                    lambda bc=bc: _unitarity(bc, 2.0, geometry.Kite(), 256, 128),
                )
            )
        checks.append(("strong_coupling_limits", 1e-2, _strong_coupling))
    return checks


def run_checks(quick: bool = True) -> list[CheckResult]:
    results = []
    for name, tol, fn in _checks(quick):
        t0 = time.perf_counter()
        observed = float(fn())
        dt = time.perf_counter() - t0
        results.append(
            CheckResult(
                name=name,
                tolerance=tol,
                observed=observed,
                passed=bool(observed <= tol),
                seconds=dt,
            )
        )
    return results


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check'.ljust(width)}  tolerance  observed   time    status"]
    for r in results:
        lines.append(
            f"{r.name.ljust(width)}  {r.tolerance:9.1e}  {r.observed:9.3e}"
            f"  {r.seconds:6.2f}s  {'pass' if r.passed else 'FAIL'}"
        )
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results)} checks, {len(results) - n_fail} passed, {n_fail} failed")
    return "\n".join(lines)
