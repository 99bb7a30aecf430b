#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the three hot kernels (pairwise distances, heat weights, weighted
scatter accumulation) and one full scatter assembly, on a few problem
sizes.  Run after building the extension:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from salda._core import _kernels_py

try:
    from salda._core import _kernels as _kernels_cy
except ImportError:
    _kernels_cy = None


def timeit(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels():
    rng = np.random.default_rng(0)
    print(f"{'kernel':<24}{'size':<18}{'numpy':>12}{'cython':>12}{'speedup':>10}")
    for n, d in [(100, 16), (400, 64), (1000, 128)]:
        x = np.ascontiguousarray(rng.normal(size=(n, d)))
        w = rng.random(n)
        c = x.mean(axis=0)
        dists = _kernels_py.pairwise_dists(x[: min(n, 400)])
        cases = [
            ("pairwise_dists", f"n={n} d={d}", (x,), "pairwise_dists"),
            ("heat_weights", f"n={dists.shape[0]}", (dists, 1.5, False), "heat_weights"),
            ("weighted_scatter", f"n={n} d={d}", (x, c, w), "weighted_scatter"),
        ]
        for name, size, args, attr in cases:
            t_py = timeit(getattr(_kernels_py, attr), *args)
            if _kernels_cy is None:
                print(f"{name:<24}{size:<18}{t_py * 1e3:>10.2f}ms{'--':>12}{'--':>10}")
            else:
                t_cy = timeit(getattr(_kernels_cy, attr), *args)
                print(
                    f"{name:<24}{size:<18}{t_py * 1e3:>10.2f}ms{t_cy * 1e3:>10.2f}ms"
                    f"{t_py / t_cy:>9.1f}x"
                )


def bench_assembly():
    # end-to-end scatter assembly through the dispatcher on both backends
    import importlib
    import os

    from salda.dataset import partition_by_class
    from salda.saliency import SaliencyResult

    rng = np.random.default_rng(1)
    classes = [rng.normal(rng.normal(0, 3, 64), 1.0, (120, 64)) for _ in range(6)]
    feats = np.vstack(classes)
    labels = np.repeat(np.arange(1, 7), 120)
    part = partition_by_class(feats, labels)
    sal = []
    for m in part.matrices:
        p = rng.random(m.shape[1])
        p /= p.sum()
        sal.append(SaliencyResult(p, m @ p, 1.0, False))

    print()
    print("full swlda_41 scatter assembly (6 classes x 120 samples, d=64):")
    for forced, label in [("1", "numpy"), ("", "cython")]:
        if forced == "" and _kernels_cy is None:
            continue
        os.environ["SALDA_PURE_PYTHON"] = forced
        import salda._core

        importlib.reload(salda._core)
        import salda.scatter

        importlib.reload(salda.scatter)
        t = timeit(salda.scatter.assemble, "swlda_41", part, None, sal, repeat=3)
        print(f"  {label:<8} {t * 1e3:8.2f} ms  (backend={salda._core.BACKEND})")
    os.environ.pop("SALDA_PURE_PYTHON", None)


if __name__ == "__main__":
    bench_kernels()
    bench_assembly()
