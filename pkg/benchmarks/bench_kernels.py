"""Compiled kernels vs the numpy fallback: agreement and timings.

Run:  python benchmarks/bench_kernels.py
"""
import time

import numpy as np

from cuspflow import _fallback

try:
    from cuspflow import _kernels
except ImportError:
    _kernels = None


def timeit(fn, *args, repeat=5):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def flat(result):
    parts = result if isinstance(result, tuple) else (result,)
    return np.concatenate([np.atleast_1d(np.asarray(x, dtype=float)) for x in parts])


def cases(rng):
    n = 2 ** 16
    phi = -np.log(np.arange(1, n + 1)) * 1.3 + rng.normal(0, 0.01, n)
    tau = rng.uniform(1, 20, n)
    delta = rng.uniform(0, 1, n)
    yield "weighted_moments", (phi, tau, delta)
    a = rng.normal(size=4096) + 1j * rng.normal(size=4096)
    b = rng.normal(size=4096) + 1j * rng.normal(size=4096)
    kappa = rng.uniform(0, 5, 4096)
    eta = np.exp(1j * rng.uniform(0, 2 * np.pi, 8))
    yield "roof_values", (a, b, kappa, eta)
    lq = np.log(rng.uniform(0.1, 1, (64, 64)))
    yield "periodic_log_traces", (lq, 0, 12)
    idx = rng.integers(-1, 4, n)
    yield "block_logsums", (phi, idx, 4)


def main():
    rng = np.random.default_rng(0)
    print(f"{'kernel':<22s} {'numpy [ms]':>11s} {'cython [ms]':>12s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, args in cases(rng):
        f_py = getattr(_fallback, name)
        t_py = timeit(f_py, *args)
        if _kernels is None:
            print(f"{name:<22s} {1e3 * t_py:11.3f} {'n/a':>12s}")
            continue
        f_cy = getattr(_kernels, name)
        t_cy = timeit(f_cy, *args)
        r_py, r_cy = flat(f_py(*args)), flat(f_cy(*args))
        diff = np.max(np.abs(r_py - r_cy) / np.maximum(1.0, np.abs(r_py)))
        print(f"{name:<22s} {1e3 * t_py:11.3f} {1e3 * t_cy:12.3f} {t_py / t_cy:8.1f} {diff:13.2e}")


if __name__ == "__main__":
    main()
