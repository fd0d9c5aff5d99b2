"""Compare the compiled and pure-numpy kernel backends.

Times the hot special-function kernels on large batches and one dense
operator assembly, switching backends in process. Run as:

    python3 benchmarks/backend_bench.py [--points 200000] [--repeats 5]
"""
from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from weyl_scatter import _backend, layerops, specfun
from weyl_scatter.geometry import Kite, build_grid
from weyl_scatter.specfun import Branch, LimitBranch


def _time(fn, repeats):
    fn()  # warm-up (first numba call compiles)
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    mean = statistics.mean(samples)
    std = statistics.stdev(samples) if len(samples) > 1 else 0.0
    return mean, std


def _cases(n_points):
    rng = np.random.default_rng(42)
    x = rng.uniform(0.05, 120.0, n_points)
    w = rng.uniform(0.05, 30.0, n_points) * np.exp(1j * rng.uniform(-1.4, 1.4, n_points))
    grid = build_grid(Kite(), 192)
    s = LimitBranch(k=2.0, branch=Branch.MINUS)
    return [
        (f"bessel_j0 on {n_points} reals", lambda: specfun.bessel_j(0, x)),
        (f"bessel_y1 on {n_points} reals", lambda: specfun.bessel_y(1, x)),
        (f"mod_bessel_k0 on {n_points} complex", lambda: specfun.mod_bessel_k(0, w)),
        ("operator assembly (kite, 384 nodes)", lambda: layerops.assemble(s, grid)),
    ]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=200_000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if not _backend.HAS_NUMBA:
        print("compiled backend unavailable; nothing to compare")
        return 1

    start = _backend.backend_name()
    results = {}
    try:
        for name in ("numpy", "numba"):
            _backend.set_backend(name)
            results[name] = [
                (label, *_time(fn, args.repeats)) for label, fn in _cases(args.points)
            ]
    finally:
        _backend.set_backend(start)

    width = max(len(label) for label, _, _ in results["numpy"])
    print(f"{'case':<{width}}  {'numpy':>16}  {'numba':>16}  {'speedup':>8}")
    for (label, m_np, s_np), (_, m_nb, s_nb) in zip(results["numpy"], results["numba"]):
        print(
            f"{label:<{width}}  "
            f"{m_np * 1e3:9.2f}±{s_np * 1e3:5.2f}ms  "
            f"{m_nb * 1e3:9.2f}±{s_nb * 1e3:5.2f}ms  "
            f"{m_np / m_nb:7.2f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
