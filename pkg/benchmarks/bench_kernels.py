#!/usr/bin/env python3
"""Compare the numba and numpy kernel backends on identical workloads.

Run without arguments: the script re-invokes itself twice as a subprocess,
once per backend (selected through the LOCALP2_DISABLE_NUMBA environment
variable, which must be set before the package is imported), then prints a
side-by-side table.  JIT compile time is excluded by calling warmup() before
the clock starts.

    python3 benchmarks/bench_kernels.py            # full comparison
    python3 benchmarks/bench_kernels.py --repeats 9
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _workloads():
    import numpy as np

    import localp2._kernels as ker
    import localp2.mirror_geometry as geom

    rng = np.random.default_rng(20260819)
    pts = rng.normal(size=20000) + 1j * rng.normal(size=20000) + 3.0
    moduli = 0.9 * (rng.random(20000) + 1j * rng.random(20000)) / 1.5
    zpath = np.linspace(0, 1, 20000) * (2.0 + 0.5j)
    seed = ker.cubic_roots(0.0)

    def bench_gamma():
        ker.gamma_array(pts)

    def bench_digamma():
        ker.digamma_array(pts)

    def bench_ellipke():
        ker.ellipke_array(moduli)

    def bench_track_roots():
        ker.track_roots(zpath, seed)

    def bench_segment_integral():
        for _ in range(500):
            ker.segment_integral(-0.5 + 0.1j, 0.4 + 0.9j, 1.1 - 0.2j, 64)

    fresh_y = iter(1.0e3 + 7.0 * n for n in range(1000))

    def bench_periods():
        # distinct y per call so the internal memoization never short-circuits
        geom.periods(next(fresh_y))

    return [
        ("gamma_array 20k pts", bench_gamma),
        ("digamma_array 20k pts", bench_digamma),
        ("ellipke_array 20k pts", bench_ellipke),
        ("track_roots 20k steps", bench_track_roots),
        ("segment_integral x500 n=64", bench_segment_integral),
        ("periods(y=1e3) end-to-end", bench_periods),
    ]


def run_worker(repeats: int) -> None:
    import localp2._kernels as ker

    ker.warmup()
    results = {"backend": ker.BACKEND, "timings": {}}
    for name, fn in _workloads():
        best = float("inf")
        for _ in range(repeats):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        results["timings"][name] = best
    json.dump(results, sys.stdout)


def run_comparison(repeats: int) -> int:
    here = os.path.abspath(__file__)
    runs = {}
    for label, disable in (("numba", ""), ("numpy", "1")):
        env = dict(os.environ)
        env["LOCALP2_DISABLE_NUMBA"] = disable
        proc = subprocess.run(
            [sys.executable, here, "--worker", "--repeats", str(repeats)],
            env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            sys.stderr.write(proc.stderr)
            return 1
        payload = json.loads(proc.stdout)
        if label == "numba" and payload["backend"] != "numba":
            sys.stderr.write("warning: numba unavailable, comparing numpy "
                             "against itself\n")
        runs[label] = payload["timings"]

    width = max(len(k) for k in runs["numba"])
    print(f"{'workload':<{width}}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    print("-" * (width + 34))
    for name in runs["numba"]:
        tn = runs["numba"][name]
        tp = runs["numpy"][name]
        print(f"{name:<{width}}  {tn:>9.4f}s  {tp:>9.4f}s  {tp / tn:>7.1f}x")
    return 0


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--worker", action="store_true",
                    help="run one backend and emit JSON (internal)")
    ap.add_argument("--repeats", type=int, default=5,
                    help="timing repeats per workload, best-of is reported")
    args = ap.parse_args()
    if args.repeats < 1:
        ap.error("--repeats must be positive")
    if args.worker:
        run_worker(args.repeats)
        return 0
    return run_comparison(args.repeats)


if __name__ == "__main__":
    sys.exit(main())
