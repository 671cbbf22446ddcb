#!/usr/bin/env python3
"""Benchmark the compiled trig-sum kernels against the NumPy fallback.

Run as: python benchmarks/bench_kernels.py [--repeat 5]
Also times one mid-size end-to-end pipeline call per backend.
"""

import argparse
import time

import numpy as np

from gssdecon import ErrorModel, gss_sample, GssModel, probit_skew, run_pipeline
from gssdecon import _backend
from gssdecon import _kernels_py

SIZES = {
    "sin_sums (n=500, grid=1024)": ("sin_sums", 1024, 500),
    "sin_sums (n=10000, grid=256)": ("sin_sums", 256, 10000),
    "cos_sin_sums (n=500, grid=1024)": ("cos_sin_sums", 1024, 500),
    "sin_transform (z=401, grid=1024)": ("sin_transform", None, None),
    "tk_vector (n=500, M=5)": ("tk_vector", None, None),
}


def time_call(fn, *args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(7)
    impls = [("python", _kernels_py)]
    if _backend.HAVE_FAST:
        from gssdecon import _fast

        impls.append(("compiled", _fast))
    else:
        print("note: compiled backend unavailable; timing the fallback only")

    rows = []
    for label, (name, grid_n, data_n) in SIZES.items():
        timings = {}
        for impl_name, impl in impls:
            fn = getattr(impl, name)
            if name in ("sin_sums", "cos_sin_sums"):
                t = np.linspace(-50, 50, grid_n)
                w = rng.normal(size=data_n)
                timings[impl_name] = time_call(fn, t, w, repeat=args.repeat)
            elif name == "sin_transform":
                z = np.linspace(0, 6, 401)
                t = np.linspace(-10, 10, 1024)
                b = rng.normal(size=1024)
                timings[impl_name] = time_call(fn, z, t, b, repeat=args.repeat)
            else:
                w = rng.normal(size=500)
                timings[impl_name] = time_call(fn, w, 0.1, 1.1, 5, repeat=args.repeat)
        rows.append((label, timings))

    width = max(len(r[0]) for r in rows) + 2
    header = f"{'kernel':<{width}}" + "".join(f"{name:>12}" for name, _ in impls)
    if len(impls) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label, timings in rows:
        line = f"{label:<{width}}"
        for impl_name, _ in impls:
            line += f"{timings[impl_name] * 1e3:>10.2f}ms"
        if len(impls) == 2:
            line += f"{timings['python'] / timings['compiled']:>9.1f}x"
        print(line)

    # one end-to-end call through whichever backend is active
    truth = GssModel(skew=probit_skew())
    err = ErrorModel("laplace", 0.2 * 0.3697304604737752)
    w = gss_sample(500, truth, 11) + err.sample(500, np.random.default_rng(12))
    t0 = time.perf_counter()
    run_pipeline(w, err, bandwidth="mise", selection="phase")
    print(f"\nrun_pipeline (n=500, mise+phase, {_backend.backend_name()} backend): "
          f"{time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
