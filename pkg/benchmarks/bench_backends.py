"""Timing comparison of the compiled and pure-numpy smoothing backends.

Runs the three backend primitives and one full bootstrap calibration at
several sample sizes, printing per-call times and the speedup of the
compiled extension. Usage: python benchmarks/bench_backends.py [--sizes
100,250,500,1000] [--repeat 5]
"""

from __future__ import annotations

import argparse
import importlib
import time

import numpy as np

from lossspec import DGPSpec, TestSpec, gen_sample, parse_kernel
from lossspec.bootstrap import bootstrap_many
from lossspec.smoothing import BandwidthRule, scaled_coords


def _load_backends():
    backends = {"python": importlib.import_module("lossspec._core_py")}
    try:
        backends["cython"] = importlib.import_module("lossspec._core")
    except ImportError:
        print("compiled extension not built; timing the python backend only")
    return backends


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="100,250,500,1000")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    backends = _load_backends()
    kernel = parse_kernel("epanechnikov")

    rows = []
    for n in sizes:
        sample = gen_sample(DGPSpec(model="s_null", n=n, seed=7))
        z = scaled_coords(sample.x)
        h = float(np.std(sample.x, ddof=1) * n ** (-2.0 / 9.0))
        resid = sample.y - sample.y.mean()
        for name in ("weights", "smooth", "loo_cv"):
            timings = {}
            for backend_name, mod in backends.items():
                if name == "weights":
                    fn = lambda m=mod: m.nw_weight_matrix(z, h, 1, 1.0)
                elif name == "smooth":
                    fn = lambda m=mod: m.nw_smooth(resid, z, h, 1, 1.0)
                else:
                    fn = lambda m=mod: m.loo_cv_criterion(resid, z, h, 1, 1.0)
                timings[backend_name] = _time(fn, args.repeat)
            rows.append((name, n, timings))

    print(f"{'primitive':<10} {'n':>5} {'python':>12} {'cython':>12} {'speedup':>8}")
    for name, n, timings in rows:
        py = timings["python"]
        cy = timings.get("cython")
        if cy is None:
            print(f"{name:<10} {n:>5} {py * 1e3:>10.3f}ms {'-':>12} {'-':>8}")
        else:
            print(
                f"{name:<10} {n:>5} {py * 1e3:>10.3f}ms {cy * 1e3:>10.3f}ms "
                f"{py / cy:>7.2f}x"
            )

    n = sizes[-1]
    sample = gen_sample(DGPSpec(model="s_null", n=n, seed=7))
    tests = [TestSpec("loss_q"), TestSpec("glr")]
    rule = BandwidthRule(kind="rot", h=None, omega=2.0 / 9.0)
    start = time.perf_counter()
    bootstrap_many(sample, kernel, rule, tests, b=99, seed=3)
    elapsed = time.perf_counter() - start
    print(f"\nfull bootstrap (n={n}, b=99, 2 tests): {elapsed:.3f}s")


if __name__ == "__main__":
    main()
