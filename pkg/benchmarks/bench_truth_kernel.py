"""Benchmark the compiled truth-discovery kernel against the pure-Python twin.

Run:  python benchmarks/bench_truth_kernel.py
"""

from __future__ import annotations

import time

import numpy as np

from credsense import _truth_loop

try:
    from credsense import _truth_kernel
except ImportError:
    _truth_kernel = None


def make_instance(rng, n):
    obs = rng.uniform(0.0, 30.0, n)
    reps = rng.uniform(0.05, 0.95, n)
    std = float(np.sqrt(((obs - obs.mean()) ** 2).mean()))
    return obs, reps, float(obs.mean()), std


def bench(fn, instances, epsilon, max_iterations, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for obs, reps, truth0, std in instances:
            fn(obs, reps, truth0, std, epsilon, max_iterations, 1e-9 * std * std, 1.0)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(1234)
    print(f"{'n':>6} {'tasks':>6} {'python':>12} {'compiled':>12} {'speedup':>8}")
    for n, tasks, epsilon in ((4, 2000, 1e-9), (32, 500, 1e-9), (128, 200, 1e-9), (366, 100, 0.1)):
        instances = [make_instance(rng, n) for _ in range(tasks)]
        t_py = bench(_truth_loop.run_fixed_point, instances, epsilon, 500)
        if _truth_kernel is None:
            print(f"{n:>6} {tasks:>6} {t_py * 1e3:>10.1f}ms {'(not built)':>12}")
            continue
        t_c = bench(_truth_kernel.run_fixed_point, instances, epsilon, 500)
        print(
            f"{n:>6} {tasks:>6} {t_py * 1e3:>10.1f}ms {t_c * 1e3:>10.1f}ms "
            f"{t_py / t_c:>7.1f}x"
        )
        # both paths must agree on a spot check
        obs, reps, truth0, std = instances[0]
        a = _truth_loop.run_fixed_point(obs, reps, truth0, std, epsilon, 500, 1e-9 * std * std, 1.0)
        b = _truth_kernel.run_fixed_point(obs, reps, truth0, std, epsilon, 500, 1e-9 * std * std, 1.0)
        assert a[0] == b[0] and a[2] == b[2]


if __name__ == "__main__":
    main()
