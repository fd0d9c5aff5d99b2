"""Command line interface.

Subcommands
    farfield    angular kernel tables for one or more wavenumbers
    smatrix     unitary scattering matrices and their unitarity residuals
    field       total-field samples on points or a rectangular grid
    resolvent   perturbed-kernel values along an absorption sweep
    validate    built-in consistency checks (quick or full tier)

Exit codes: 0 success, 1 unexpected error, 2 configuration error,
3 numerical failure (singular or unreliable boundary system).

Heavy numerical imports happen after argument parsing so that --threads can
pin the BLAS and compiler thread pools through the environment first; with
a fixed thread count, repeated runs of the same configuration write
byte-identical CSV files.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

_THREAD_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
    "NUMBA_NUM_THREADS",
)


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


# ---------------------------------------------------------------------------
# configuration parsing
# ---------------------------------------------------------------------------

def _require(cfg: dict, key: str, ctx: str):
    if key not in cfg:
        raise ConfigError(f"missing '{key}' in {ctx}")
    return cfg[key]


def _check_keys(cfg: dict, allowed: set, ctx: str):
    extra = set(cfg) - allowed
    if extra:
        raise ConfigError(f"unknown key(s) {sorted(extra)} in {ctx}")


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    _check_keys(
        cfg,
        {"geometry", "arc", "condition", "k", "resolution", "field", "incident", "resolvent", "branch"},
        "config root",
    )
    return cfg


def _build_curve(cfg: dict):
    from . import geometry

    geo = _require(cfg, "geometry", "config")
    kind = _require(geo, "kind", "geometry")
    center = tuple(geo.get("center", (0.0, 0.0)))
    try:
        if kind == "circle":
            _check_keys(geo, {"kind", "radius", "center"}, "geometry")
            return geometry.Circle(radius=float(geo.get("radius", 1.0)), center=center)
        if kind == "ellipse":
            _check_keys(geo, {"kind", "a", "b", "center"}, "geometry")
            return geometry.Ellipse(a=float(_require(geo, "a", "geometry")),
                                    b=float(_require(geo, "b", "geometry")), center=center)
        if kind == "kite":
            _check_keys(geo, {"kind"}, "geometry")
            return geometry.Kite()
        if kind == "file":
            _check_keys(geo, {"kind", "path"}, "geometry")
            return geometry.TabulatedSmooth.from_file(_require(geo, "path", "geometry"))
    except (ValueError, OSError) as exc:
        raise ConfigError(f"bad geometry: {exc}") from exc
    raise ConfigError(f"unknown geometry kind {kind!r}")


def _build_grid(cfg: dict, N: int):
    from . import geometry

    curve = _build_curve(cfg)
    if "arc" in cfg:
        arc_cfg = cfg["arc"]
        _check_keys(arc_cfg, {"t0", "t1"}, "arc")
        try:
            arc = geometry.ArcSpec(
                curve=curve,
                t0=float(_require(arc_cfg, "t0", "arc")),
                t1=float(_require(arc_cfg, "t1", "arc")),
            )
            return geometry.build_arc_grid(arc, N)
        except ValueError as exc:
            raise ConfigError(f"bad arc: {exc}") from exc
    try:
        return geometry.build_grid(curve, N)
    except ValueError as exc:
        raise ConfigError(f"bad geometry/resolution: {exc}") from exc


def _build_condition(cfg: dict):
    from . import weyl

    cond = _require(cfg, "condition", "config")
    kind = _require(cond, "kind", "condition")
    try:
        if kind == "dirichlet":
            _check_keys(cond, {"kind"}, "condition")
            return weyl.Dirichlet()
        if kind == "neumann":
            _check_keys(cond, {"kind"}, "condition")
            return weyl.Neumann()
        if kind == "robin":
            _check_keys(cond, {"kind", "b_minus", "b_plus"}, "condition")
            return weyl.Robin(
                b_minus=float(_require(cond, "b_minus", "condition")),
                b_plus=float(_require(cond, "b_plus", "condition")),
            )
        if kind == "delta":
            _check_keys(cond, {"kind", "alpha"}, "condition")
            return weyl.Delta(alpha=float(_require(cond, "alpha", "condition")))
        if kind == "delta_prime":
            _check_keys(cond, {"kind", "beta"}, "condition")
            return weyl.DeltaPrime(beta=float(_require(cond, "beta", "condition")))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad condition: {exc}") from exc
    raise ConfigError(f"unknown condition kind {kind!r}")


def _k_values(cfg: dict) -> list:
    k = _require(cfg, "k", "config")
    vals = k if isinstance(k, list) else [k]
    try:
        vals = [float(v) for v in vals]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"k values must be numbers: {exc}") from exc
    if not vals or any(v <= 0 for v in vals):
        raise ConfigError("k must be positive (scalar or non-empty list)")
    return vals


def _resolution(cfg: dict, need_m: bool = True):
    res = cfg.get("resolution", {})
    _check_keys(res, {"N", "M"}, "resolution")
    N = int(res.get("N", 128))
    M = int(res.get("M", 64))
    if need_m and M < 4:
        raise ConfigError("resolution.M must be at least 4")
    return N, M


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.15g}"


def _write_rows(path: str, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _write_manifest(out_dir: str, payload: dict) -> str:
    path = os.path.join(out_dir, "manifest.json")
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)
    return path


def _manifest_base(command: str, cfg: dict, threads) -> dict:
    import weyl_scatter
    from . import scattering

    return {
        "command": command,
        "config": cfg,
        "version": weyl_scatter.__version__,
        "backend": weyl_scatter.backend_name(),
        "threads": threads,
        "conventions": scattering.convention_record(),
        "outputs": [],
        "timings": {},
        "cond_estimates": {},
        "checks": {},
    }


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _run_farfield(cfg, out_dir, threads, quiet):
    import numpy as np

    from . import layerops, scattering, weyl
    from .specfun import Branch, LimitBranch

    bc = _build_condition(cfg)
    N, M = _resolution(cfg)
    manifest = _manifest_base("farfield", cfg, threads)
    dg = scattering.DirectionGrid(M)
    for k in _k_values(cfg):
        t0 = time.perf_counter()
        grid = _build_grid(cfg, N)
        sys_ = weyl.assemble_weyl(bc, layerops.assemble(LimitBranch(k=k, branch=Branch.MINUS), grid))
        g0 = np.exp(1j * k * grid.points @ dg.vectors.T)
        g1 = 1j * k * (grid.normals @ dg.vectors.T) * g0
        dens = sys_.solve(g0, g1)
        wq = grid.density_weights * grid.jacobians
        phase = np.exp(-1j * k * dg.vectors @ grid.points.T)
        dn = dg.vectors @ grid.normals.T
        kern = -0.25j / np.pi * (
            phase @ (wq[:, None] * dens.phi)
            - 1j * k * (phase * dn) @ (wq[:, None] * dens.psi)
        )
        name = f"farfield_k{k:g}.csv"
        th = dg.thetas
        rows = (
            [_fmt(th[i]), _fmt(th[j]), _fmt(kern[i, j].real), _fmt(kern[i, j].imag)]
            for i in range(M)
            for j in range(M)
        )
        _write_rows(os.path.join(out_dir, name), "theta_out,theta_in,re_s,im_s", rows)
        manifest["outputs"].append(name)
        manifest["cond_estimates"][f"k={k:g}"] = sys_.cond_estimate()
        manifest["timings"][f"k={k:g}"] = time.perf_counter() - t0
        if not quiet:
            print(f"farfield k={k:g}: wrote {name}")
    _write_manifest(out_dir, manifest)
    return 0


def _run_smatrix(cfg, out_dir, threads, quiet):
    from . import scattering

    bc = _build_condition(cfg)
    N, M = _resolution(cfg)
    manifest = _manifest_base("smatrix", cfg, threads)
    dg = scattering.DirectionGrid(M)
    for k in _k_values(cfg):
        t0 = time.perf_counter()
        grid = _build_grid(cfg, N)
        smx = scattering.s_matrix(bc, k, grid, dg)
        mat = smx.matrix
        name = f"smatrix_k{k:g}.csv"
        rows = (
            [str(i), str(j), _fmt(mat[i, j].real), _fmt(mat[i, j].imag)]
            for i in range(M)
            for j in range(M)
        )
        _write_rows(os.path.join(out_dir, name), "row,col,re,im", rows)
        manifest["outputs"].append(name)
        manifest["checks"][f"unitarity_residual_k={k:g}"] = smx.unitarity_residual()
        manifest["timings"][f"k={k:g}"] = time.perf_counter() - t0
        if not quiet:
            print(f"smatrix k={k:g}: unitarity residual {smx.unitarity_residual():.3e}")
    _write_manifest(out_dir, manifest)
    return 0


def _field_points(cfg):
    import numpy as np

    fld = _require(cfg, "field", "config")
    _check_keys(fld, {"points", "grid"}, "field")
    if ("points" in fld) == ("grid" in fld):
        raise ConfigError("field needs exactly one of 'points' or 'grid'")
    if "points" in fld:
        pts = np.asarray(fld["points"], float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ConfigError("field.points must be a list of [x, y] pairs")
        return pts
    g = fld["grid"]
    _check_keys(g, {"xmin", "xmax", "ymin", "ymax", "nx", "ny"}, "field.grid")
    try:
        xs = np.linspace(float(g["xmin"]), float(g["xmax"]), int(g["nx"]))
        ys = np.linspace(float(g["ymin"]), float(g["ymax"]), int(g["ny"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad field.grid: {exc}") from exc
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    return np.stack([xx.ravel(), yy.ravel()], axis=1)


def _run_field(cfg, out_dir, threads, quiet):
    import numpy as np

    from . import layerops, scattering

    bc = _build_condition(cfg)
    N, _ = _resolution(cfg, need_m=False)
    theta_in = float(cfg.get("incident", {}).get("theta", 0.0))
    d = np.array([np.cos(theta_in), np.sin(theta_in)])
    pts = _field_points(cfg)
    manifest = _manifest_base("field", cfg, threads)
    for k in _k_values(cfg):
        t0 = time.perf_counter()
        grid = _build_grid(cfg, N)
        u = scattering.generalized_eigenfunction(bc, k, grid, d, pts)
        near = layerops.exclusion_mask(grid, pts)
        n_near = int(np.count_nonzero(near))
        if n_near and not quiet:
            print(
                f"field k={k:g}: {n_near} point(s) within the near-boundary "
                "exclusion band are flagged (column 'near_boundary')"
            )
        name = f"field_k{k:g}.csv"
        rows = (
            [_fmt(pts[i, 0]), _fmt(pts[i, 1]), _fmt(u[i].real), _fmt(u[i].imag), str(int(near[i]))]
            for i in range(len(pts))
        )
        _write_rows(os.path.join(out_dir, name), "x,y,re_u,im_u,near_boundary", rows)
        manifest["outputs"].append(name)
        manifest["checks"][f"near_boundary_points_k={k:g}"] = n_near
        manifest["timings"][f"k={k:g}"] = time.perf_counter() - t0
    _write_manifest(out_dir, manifest)
    return 0


def _run_resolvent(cfg, out_dir, threads, quiet):
    import numpy as np

    from . import scattering
    from .specfun import Branch, LimitBranch, OffAxis

    bc = _build_condition(cfg)
    N, _ = _resolution(cfg, need_m=False)
    rcfg = _require(cfg, "resolvent", "config")
    _check_keys(rcfg, {"z", "epsilons", "source", "points"}, "resolvent")
    z = float(_require(rcfg, "z", "resolvent"))
    if z >= 0:
        raise ConfigError("resolvent.z must be negative (absorption sweep onto the spectrum)")
    epsilons = [float(e) for e in rcfg.get("epsilons", [1e-1, 1e-2, 1e-3])]
    if any(e <= 0 for e in epsilons):
        raise ConfigError("resolvent.epsilons must be positive")
    source = np.asarray(_require(rcfg, "source", "resolvent"), float)
    pts = np.asarray(_require(rcfg, "points", "resolvent"), float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ConfigError("resolvent.points must be a list of [x, y] pairs")
    manifest = _manifest_base("resolvent", cfg, threads)
    t0 = time.perf_counter()
    grid = _build_grid(cfg, N)
    rows = []
    for eps in epsilons:
        vals = scattering.resolvent_kernel(bc, OffAxis(z - 1j * eps), grid, pts, source)
        for p, v in zip(pts, vals):
            rows.append([_fmt(eps), _fmt(p[0]), _fmt(p[1]), _fmt(v.real), _fmt(v.imag)])
    k = float(np.sqrt(-z))
    vals = scattering.resolvent_kernel(bc, LimitBranch(k=k, branch=Branch.MINUS), grid, pts, source)
    for p, v in zip(pts, vals):
        rows.append(["0", _fmt(p[0]), _fmt(p[1]), _fmt(v.real), _fmt(v.imag)])
    name = "resolvent.csv"
    _write_rows(os.path.join(out_dir, name), "eps,x,y,re_r,im_r", rows)
    manifest["outputs"].append(name)
    manifest["checks"]["limit_wavenumber"] = k
    manifest["timings"]["sweep"] = time.perf_counter() - t0
    _write_manifest(out_dir, manifest)
    if not quiet:
        print(f"resolvent: wrote {name} ({len(epsilons)} absorption rows + limit row)")
    return 0


def _run_validate(tier, out_dir, threads, quiet):
    from . import validate

    results = validate.run_checks(quick=(tier == "quick"))
    print(validate.format_table(results))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        payload = {
            "command": f"validate --{tier}",
            "tier": tier,
            "threads": threads,
            "results": [
                {
                    "name": r.name,
                    "tolerance": r.tolerance,
                    "observed": r.observed,
                    "passed": r.passed,
                    "seconds": r.seconds,
                }
                for r in results
            ],
        }
        with open(os.path.join(out_dir, "validate.json"), "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="weyl-scatter",
        description="Boundary-integral scattering engine for curves with "
        "classical and point-interaction boundary conditions.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name, needs_config in (
        ("farfield", True),
        ("smatrix", True),
        ("field", True),
        ("resolvent", True),
        ("validate", False),
    ):
        sp = sub.add_parser(name)
        if needs_config:
            sp.add_argument("--config", required=True, help="JSON run configuration")
            sp.add_argument("--out", default=".", help="output directory")
        else:
            sp.add_argument("--quick", action="store_true", help="quick tier (default)")
            sp.add_argument("--full", action="store_true", help="full tier")
            sp.add_argument("--out", default=None, help="optional directory for validate.json")
        sp.add_argument("--threads", type=int, default=None, help="pin worker thread count")
        sp.add_argument("--quiet", action="store_true", help="suppress progress output")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.threads is not None:
        if args.threads < 1:
            print("error: --threads must be >= 1", file=sys.stderr)
            return 2
        for var in _THREAD_VARS:
            os.environ[var] = str(args.threads)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING)

    try:
        if args.command == "validate":
            tier = "full" if args.full else "quick"
            return _run_validate(tier, args.out, args.threads, args.quiet)
        cfg = load_config(args.config)
        out_dir = args.out
        os.makedirs(out_dir, exist_ok=True)
        runner = {
            "farfield": _run_farfield,
            "smatrix": _run_smatrix,
            "field": _run_field,
            "resolvent": _run_resolvent,
        }[args.command]
        return runner(cfg, out_dir, args.threads, args.quiet)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - map known numerical failures
        from .weyl import NumericalError

        if isinstance(exc, NumericalError):
            print(f"numerical error: {exc}", file=sys.stderr)
            return 3
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
