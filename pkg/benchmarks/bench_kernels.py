"""Compare the compiled and numpy corner kernels, and a full solve on each backend.

    python benchmarks/bench_kernels.py [--repeat 20]
"""
import argparse
import time

import numpy as np

from costdro import kernels
from costdro.ambiguity import SampleSet, SupportBox, corner_matrix
from costdro.costs import CostModel
from costdro.solver import DroProblem, SolverConfig, solve


def _time(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_table(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for N, m in [(20, 3), (200, 4), (1000, 5), (1000, 8), (1000, 10)]:
        box = SupportBox(np.full(m, -0.2), np.full(m, 0.3))
        V = corner_matrix(box)
        a = rng.normal(size=V.shape[0])
        Z = rng.normal(size=(N, m))
        X = rng.uniform(box.lower, box.upper, (N, m))
        for name, fn in [
            ("corner_min", lambda b: kernels.corner_min(a, Z, X, V, backend=b)),
            ("softmin", lambda b: kernels.softmin(a, Z, X, V, 1e-3, backend=b)),
        ]:
            t_py = _time(lambda: fn("python"), repeat)
            t_c = _time(lambda: fn("cython"), repeat) if "cython" in kernels.available_backends() else float("nan")
            rows.append((name, N, V.shape[0], m, t_py, t_c))
    print(f"{'kernel':<11}{'N':>6}{'K':>6}{'m':>4}{'python ms':>12}{'cython ms':>12}{'speedup':>9}")
    for name, N, K, m, t_py, t_c in rows:
        print(f"{name:<11}{N:>6}{K:>6}{m:>4}{t_py * 1e3:>12.3f}{t_c * 1e3:>12.3f}{t_py / t_c:>9.1f}")


def solve_table():
    rng = np.random.default_rng(1)
    m, N = 5, 200
    lo, hi = np.full(m, -0.2), np.full(m, 0.3)
    X = rng.uniform(lo, hi, (N, m))
    p = DroProblem(SampleSet(X), SupportBox(lo, hi), 0.02, CostModel.proportional(0.001, m))
    print(f"\nfull solve, N={N}, m={m}, 2^{m} corners")
    for backend in kernels.available_backends():
        t0 = time.perf_counter()
        sol = solve(p, SolverConfig(backend=backend, gap_samples=0))
        dt = time.perf_counter() - t0
        print(f"  {backend:<7} {dt:7.2f}s  objective={sol.objective:.9f}  iterations={sol.diagnostics.iterations}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    print(f"default backend: {kernels.BACKEND}")
    kernel_table(args.repeat)
    solve_table()
