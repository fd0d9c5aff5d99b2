from __future__ import annotations

import csv
import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from weyl_scatter.cli import main

GOLDEN_DIR = Path(__file__).parent / "golden"
GOLDEN_FARFIELD = GOLDEN_DIR / "farfield_circle_dirichlet_k2.csv"

FARFIELD_CFG = {
    "geometry": {"kind": "circle", "radius": 1.0},
    "condition": {"kind": "dirichlet"},
    "k": 2.0,
    "resolution": {"N": 64, "M": 16},
}


def _write_cfg(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def _read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = np.array([[float(v) for v in row] for row in reader])
    return header, rows


def _seed_golden():
    """Write the reference far-field table from the separated solution."""
    from weyl_scatter.oracle import mie_scattering_kernel
    from weyl_scatter.weyl import Dirichlet

    m = 16
    thetas = 2 * np.pi * np.arange(m) / m
    kern = mie_scattering_kernel(Dirichlet(), 2.0, 1.0, thetas, thetas)
    GOLDEN_DIR.mkdir(exist_ok=True)
    fmt = "{:.15g}".format
    lines = ["theta_out,theta_in,re_s,im_s"]
    for i in range(m):
        for j in range(m):
            lines.append(
                ",".join(
                    [fmt(thetas[i]), fmt(thetas[j]), fmt(kern[i, j].real), fmt(kern[i, j].imag)]
                )
            )
    GOLDEN_FARFIELD.write_text("\n".join(lines) + "\n", newline="\n")


if os.environ.get("WEYL_SCATTER_SEED_GOLDEN") == "1" or not GOLDEN_FARFIELD.exists():
    _seed_golden()


# ---------------------------------------------------------------------------
# farfield command
# ---------------------------------------------------------------------------

def test_farfield_matches_golden_reference(tmp_path):
    cfg = _write_cfg(tmp_path, FARFIELD_CFG)
    out = tmp_path / "out"
    assert main(["farfield", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    header, got = _read_csv(out / "farfield_k2.csv")
    assert header == ["theta_out", "theta_in", "re_s", "im_s"]
    ref_header, ref = _read_csv(GOLDEN_FARFIELD)
    assert header == ref_header
    assert got.shape == ref.shape == (256, 4)
    np.testing.assert_allclose(got[:, :2], ref[:, :2], atol=1e-14)
    assert np.max(np.abs(got[:, 2:] - ref[:, 2:])) <= 1e-8


def test_farfield_k_sweep_outputs(tmp_path):
    cfg = dict(FARFIELD_CFG)
    cfg["k"] = [0.5, 2.0]
    out = tmp_path / "out"
    assert main(["farfield", "--config", _write_cfg(tmp_path, cfg), "--out", str(out), "--quiet"]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["farfield_k0.5.csv", "farfield_k2.csv", "manifest.json"]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "farfield"
    assert manifest["config"]["k"] == [0.5, 2.0]
    assert set(manifest["outputs"]) == {"farfield_k0.5.csv", "farfield_k2.csv"}
    assert set(manifest["cond_estimates"]) == {"k=0.5", "k=2"}
    assert all(v > 0 for v in manifest["timings"].values())
    assert "kernel_prefactor" in manifest["conventions"]
    assert not list(out.glob("*.tmp"))


def test_farfield_values_are_full_precision(tmp_path):
    cfg = _write_cfg(tmp_path, FARFIELD_CFG)
    out = tmp_path / "out"
    main(["farfield", "--config", cfg, "--out", str(out), "--quiet"])
    body = (out / "farfield_k2.csv").read_text().splitlines()[1:]
    # 15 significant digits means mantissas longer than 10 chars appear
    assert any(len(cell.split(".")[-1]) >= 12 for line in body for cell in line.split(","))


# ---------------------------------------------------------------------------
# smatrix command
# ---------------------------------------------------------------------------

def test_smatrix_reports_unitarity(tmp_path):
    cfg = {
        "geometry": {"kind": "circle", "radius": 1.0},
        "condition": {"kind": "robin", "b_minus": -1.0, "b_plus": 1.0},
        "k": 2.0,
        "resolution": {"N": 64, "M": 16},
    }
    out = tmp_path / "out"
    assert main(["smatrix", "--config", _write_cfg(tmp_path, cfg), "--out", str(out), "--quiet"]) == 0
    header, rows = _read_csv(out / "smatrix_k2.csv")
    assert header == ["row", "col", "re", "im"]
    assert rows.shape == (256, 4)
    s = (rows[:, 2] + 1j * rows[:, 3]).reshape(16, 16)
    assert np.linalg.norm(s @ s.conj().T - np.eye(16), 2) <= 1e-10
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["checks"]["unitarity_residual_k=2"] <= 1e-10


# ---------------------------------------------------------------------------
# field command
# ---------------------------------------------------------------------------

def test_field_grid_output_and_flags(tmp_path):
    cfg = {
        "geometry": {"kind": "kite"},
        "condition": {"kind": "delta", "alpha": 2.0},
        "k": 2.0,
        "resolution": {"N": 64},
        "incident": {"theta": 0.3},
        "field": {"grid": {"xmin": -3, "xmax": 3, "ymin": -3, "ymax": 3, "nx": 8, "ny": 8}},
    }
    out = tmp_path / "out"
    assert main(["field", "--config", _write_cfg(tmp_path, cfg), "--out", str(out), "--quiet"]) == 0
    header, rows = _read_csv(out / "field_k2.csv")
    assert header == ["x", "y", "re_u", "im_u", "near_boundary"]
    assert rows.shape == (64, 5)
    flags = rows[:, 4]
    assert set(np.unique(flags)) <= {0.0, 1.0}
    assert np.any(flags == 1.0) and np.any(flags == 0.0)
    # flagged points still carry field values
    assert np.all(np.isfinite(rows[:, 2:4]))
    assert np.max(np.abs(rows[:, 2:4])) > 0.1


def test_field_requires_exactly_one_point_source(tmp_path):
    cfg = {
        "geometry": {"kind": "circle"},
        "condition": {"kind": "dirichlet"},
        "k": 2.0,
        "field": {},
    }
    assert main(["field", "--config", _write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o"), "--quiet"]) == 2
    cfg["field"] = {
        "points": [[2.0, 0.0]],
        "grid": {"xmin": 0, "xmax": 1, "ymin": 0, "ymax": 1, "nx": 2, "ny": 2},
    }
    assert main(["field", "--config", _write_cfg(tmp_path, cfg, "c2.json"), "--out", str(tmp_path / "o2"), "--quiet"]) == 2


# ---------------------------------------------------------------------------
# resolvent command
# ---------------------------------------------------------------------------

def test_resolvent_sweep_with_limit_row(tmp_path):
    cfg = {
        "geometry": {"kind": "circle", "radius": 1.0},
        "condition": {"kind": "delta", "alpha": 2.0},
        "k": 2.0,
        "resolution": {"N": 64},
        "resolvent": {
            "z": -4.0,
            "epsilons": [0.1, 0.01, 0.001],
            "source": [2.5, 0.4],
            "points": [[0.2, 2.2], [-1.9, -0.7]],
        },
    }
    out = tmp_path / "out"
    assert main(["resolvent", "--config", _write_cfg(tmp_path, cfg), "--out", str(out), "--quiet"]) == 0
    header, rows = _read_csv(out / "resolvent.csv")
    assert header == ["eps", "x", "y", "re_r", "im_r"]
    assert rows.shape == (8, 5)
    eps = rows[:, 0]
    assert sorted(set(eps)) == [0.0, 0.001, 0.01, 0.1]
    # the eps -> 0 rows converge linearly to the limit row
    limit = rows[eps == 0.0][:, 3:5]
    gaps = []
    for e in (0.1, 0.01, 0.001):
        vals = rows[eps == e][:, 3:5]
        gaps.append(np.max(np.abs(vals - limit)))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[1] / gaps[0] == pytest.approx(0.1, rel=0.3)


def test_resolvent_requires_negative_z(tmp_path):
    cfg = {
        "geometry": {"kind": "circle"},
        "condition": {"kind": "dirichlet"},
        "k": 2.0,
        "resolvent": {"z": 4.0, "epsilons": [0.1], "source": [2.0, 0.0], "points": [[0.0, 2.0]]},
    }
    assert main(["resolvent", "--config", _write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o"), "--quiet"]) == 2


# ---------------------------------------------------------------------------
# failure modes and exit codes
# ---------------------------------------------------------------------------

def test_unknown_geometry_exits_2(tmp_path):
    cfg = {"geometry": {"kind": "hexagon"}, "condition": {"kind": "dirichlet"}, "k": 2.0}
    assert main(["farfield", "--config", _write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o"), "--quiet"]) == 2


def test_unknown_root_key_exits_2(tmp_path):
    cfg = dict(FARFIELD_CFG)
    cfg["wavenumber"] = 2.0
    assert main(["farfield", "--config", _write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o"), "--quiet"]) == 2


def test_missing_config_file_exits_2(tmp_path):
    assert main(["farfield", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o"), "--quiet"]) == 2


def test_nonpositive_k_exits_2(tmp_path):
    cfg = dict(FARFIELD_CFG)
    cfg["k"] = -1.0
    assert main(["farfield", "--config", _write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o"), "--quiet"]) == 2


def test_interior_resonance_exits_3(tmp_path):
    cfg = dict(FARFIELD_CFG)
    cfg["k"] = 2.404825557695773
    assert main(["farfield", "--config", _write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o"), "--quiet"]) == 3


# ---------------------------------------------------------------------------
# validate command
# ---------------------------------------------------------------------------

def test_validate_quick(tmp_path, capsys):
    out = tmp_path / "v"
    assert main(["validate", "--quick", "--out", str(out), "--quiet"]) == 0
    report = json.loads((out / "validate.json").read_text())
    assert report["tier"] == "quick"
    assert len(report["results"]) >= 8
    assert all(item["passed"] for item in report["results"])


# ---------------------------------------------------------------------------
# determinism across processes
# ---------------------------------------------------------------------------

def _run_subprocess_farfield(cfg_path, out_dir):
    code = ["import sys", "from weyl_scatter.cli import main",
            "sys.exit(main(sys.argv[1:]))"]
    res = subprocess.run(
        [sys.executable, "-c", "; ".join(code), "farfield", "--config", cfg_path,
         "--out", out_dir, "--threads", "1", "--quiet"],
        capture_output=True,
        text=True,
        timeout=300,
    )
    assert res.returncode == 0, res.stderr
    return Path(out_dir) / "farfield_k2.csv"


def test_rerun_is_byte_identical(tmp_path):
    cfg = _write_cfg(tmp_path, FARFIELD_CFG)
    a = _run_subprocess_farfield(cfg, str(tmp_path / "a"))
    b = _run_subprocess_farfield(cfg, str(tmp_path / "b"))
    assert a.read_bytes() == b.read_bytes()
