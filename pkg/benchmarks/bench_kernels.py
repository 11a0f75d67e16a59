"""Compiled vs numpy kernels on the batch sizes the experiments use.

    python3 benchmarks/bench_kernels.py [--rows N] [--repeat R]
"""
import argparse
import time

import numpy as np

from multiplank import _pykernels, kernels
from multiplank.geom import Fan, fan_rays


def cases(rows: int, rng):
    X2 = rng.normal(size=(rows, 2))
    X3 = rng.normal(size=(rows, 3))
    V6 = rng.normal(size=(6, 2))
    V40 = np.column_stack([np.cos(np.arange(40) * np.pi / 20), np.sin(np.arange(40) * np.pi / 20)])
    V5 = rng.normal(size=(5, 3))
    t = 2 * np.pi * np.arange(256) / 256
    A = np.column_stack([np.cos(t), np.sin(t)]) / np.cos(np.pi / 256)
    apex, dirs = fan_rays([Fan((0.1, 0.2), 3, 0.3), Fan((-0.4, 0.0), 3, 1.0), Fan((0.0, -0.5), 3, 2.0)])
    return [
        ("plank_margin m=6 n=2", "plank_margin", (V6, X2)),
        ("plank_margin m=40 n=2", "plank_margin", (V40, X2)),
        ("plank_margin m=5 n=3", "plank_margin", (V5, X3)),
        ("cell_margin m=6 n=2", "cell_margin", (V6, X2)),
        ("gauge_norms 256-gon", "gauge_norms", (A, X2)),
        ("gauge_plank_margin m=6", "gauge_plank_margin", (V6, A, X2)),
        ("fan_clearance 9 rays", "fan_clearance", (X2, apex, dirs)),
    ]


def best_of(fn, args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"compiled backend available: {kernels.BACKEND == 'cython'}; rows = {a.rows}")
    print(f"{'kernel':28s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s} {'max |diff|':>11s}")
    for label, name, args in cases(a.rows, rng):
        py = getattr(_pykernels, name)
        tp = best_of(py, args, a.repeat)
        if kernels.BACKEND == "cython":
            from multiplank import _ckernels

            cy = getattr(_ckernels, name)
            tc = best_of(cy, args, a.repeat)
            diff = float(np.abs(py(*args) - cy(*args)).max())
            print(f"{label:28s} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f} {diff:11.2e}")
        else:
            print(f"{label:28s} {tp:11.4f} {'-':>11s}")


if __name__ == "__main__":
    main()
