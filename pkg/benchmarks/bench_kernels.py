"""Benchmark the compiled kernels against the pure NumPy/Python fallbacks.

Run:  python benchmarks/bench_kernels.py

The same comparison can be driven end to end by running any pipeline with
CLASSGROUP_NO_NUMBA=1, which makes the package select the fallback path at
import time.
"""

import time

import numpy as np

from classgroup import kernels
from classgroup.polynomials import primes_up_to


def _ldl(G):
    n = len(G)
    L = np.eye(n)
    D = np.zeros(n)
    for i in range(n):
        for j in range(i):
            L[i, j] = (G[i][j] - sum(L[i, k] * L[j, k] * D[k]
                                     for k in range(j))) / D[j]
        D[i] = G[i][i] - sum(L[i, k] ** 2 * D[k] for k in range(i))
    return L, D


def bench(label, fn, *args, repeat=3):
    fn(*args)  # warm-up (and JIT compile on the numba path)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    print(f"{label:46s} {best * 1e3:10.2f} ms")
    return out, best


def main():
    print(f"numba path active: {kernels.USING_NUMBA}")
    rng = np.random.default_rng(0)

    n = 20
    B = rng.integers(-50, 51, size=(n, n))
    G = (B @ B.T).tolist()
    mu, rr = _ldl(G)
    bound = float(min(G[i][i] for i in range(n))) * 1.05

    (c1, _, n1), t_fast = bench("enumeration (20-dim, compiled/dispatch)",
                                kernels.enum_collect, mu, rr, bound, 200000)
    (c2, _, n2), t_py = bench("enumeration (20-dim, python fallback)",
                              kernels.enum_collect_py, mu, rr, bound, 200000)
    assert c1 == c2 and n1 == n2
    print(f"{'':46s} speedup {t_py / t_fast:8.1f}x   "
          f"({n1} nodes, {c1} vectors)")

    primes = np.array(primes_up_to(1000), dtype=np.int64)
    start, count = np.int64(10 ** 8), np.int64(20000)
    (f1), t_fast = bench("smoothness scan (2e4 ints, compiled/dispatch)",
                         kernels.smooth_flags_range, start, count, primes)
    (f2), t_py = bench("smoothness scan (2e4 ints, python fallback)",
                       kernels.smooth_flags_range_py, start, count, primes)
    assert (f1 == f2).all()
    print(f"{'':46s} speedup {t_py / t_fast:8.1f}x   "
          f"({int(f1.sum())} smooth)")


if __name__ == "__main__":
    main()
