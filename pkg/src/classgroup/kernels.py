"""Hot numeric kernels, compiled with numba when available.

The two kernels that dominate runtime are lattice-vector enumeration (inner
loop of every BKZ block) and trial-division smoothness scans.  Both operate on
fixed-width data (float64 Gram-Schmidt data, int64 integers); the exact big
integer layers live elsewhere and only hand sanitized inputs down here.

Setting the environment variable ``CLASSGROUP_NO_NUMBA=1`` selects the pure
NumPy/Python fallback path.  Both paths implement the identical algorithm and
are compared by the test suite and by ``benchmarks/bench_kernels.py``.
"""

import os

import numpy as np

_DISABLED = os.environ.get("CLASSGROUP_NO_NUMBA", "").strip() not in ("", "0")

if not _DISABLED:
    try:
        from numba import njit

        USING_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USING_NUMBA = False
else:
    USING_NUMBA = False


def enum_collect_py(mu, rr, bound2, max_out):
    """Collect integer coefficient vectors x != 0, x[n-1] >= 0, with
    sum_j rr[j] * (x[j] - c_j)^2 <= bound2 where c_j = -sum_{i>j} mu[i,j]x[i].

    mu is the unit lower-triangular Gram-Schmidt coefficient matrix and rr the
    squared Gram-Schmidt lengths, both float64.  Schnorr-Euchner zig-zag order;
    pruning relies on |x[j] - c_j| being non-decreasing along each zig-zag.

    Returns (count, out, nodes).  out[:min(count, max_out)] holds the vectors;
    count may exceed max_out, in which case the caller must retry with a
    larger buffer.
    """
    n = rr.shape[0]
    out = np.zeros((max_out, n), dtype=np.int64)
    x = np.zeros(n, dtype=np.int64)
    dx = np.zeros(n, dtype=np.int64)
    ddx = np.zeros(n, dtype=np.int64)
    center = np.zeros(n, dtype=np.float64)
    dist = np.zeros(n + 1, dtype=np.float64)
    count = 0
    nodes = 0
    j = n - 1
    while True:
        nodes += 1
        y = float(x[j]) - center[j]
        rho = dist[j + 1] + rr[j] * y * y
        if rho <= bound2:
            if j == 0:
                nz = False
                for t in range(n):
                    if x[t] != 0:
                        nz = True
                        break
                if nz:
                    if count < max_out:
                        for t in range(n):
                            out[count, t] = x[t]
                    count += 1
                ddx[0] = -ddx[0]
                dx[0] = ddx[0] - dx[0]
                x[0] += dx[0]
            else:
                dist[j] = rho
                j -= 1
                c = 0.0
                for i in range(j + 1, n):
                    c -= mu[i, j] * float(x[i])
                center[j] = c
                xj = np.int64(np.rint(c))
                x[j] = xj
                dx[j] = 0
                ddx[j] = -1 if c >= float(xj) else 1
        else:
            if j == n - 1:
                break
            j += 1
            if j == n - 1:
                x[j] += 1  # top level explores the nonnegative branch only
            else:
                ddx[j] = -ddx[j]
                dx[j] = ddx[j] - dx[j]
                x[j] += dx[j]
    return count, out, nodes


def smooth_flags_range_py(start, count, primes):
    """Flag which of start..start+count-1 factor completely over `primes`.

    All inputs int64; start + count must stay below 2**63.  Returns a uint8
    array of length count.
    """
    flags = np.zeros(count, dtype=np.uint8)
    for idx in range(count):
        m = start + idx
        for t in range(primes.shape[0]):
            p = primes[t]
            if p * p > m:
                break
            while m % p == 0:
                m //= p
        if m == 1 or (primes.shape[0] > 0 and m <= primes[primes.shape[0] - 1]):
            # leftover m is prime; smooth iff it is within the prime table
            lo, hi = 0, primes.shape[0] - 1
            found = m == 1
            while not found and lo <= hi:
                mid = (lo + hi) // 2
                if primes[mid] == m:
                    found = True
                elif primes[mid] < m:
                    lo = mid + 1
                else:
                    hi = mid - 1
            if found:
                flags[idx] = 1
    return flags


def trial_divide_py(n, primes):
    """Exponents of `primes` in n plus the remaining cofactor (all int64)."""
    exps = np.zeros(primes.shape[0], dtype=np.int64)
    m = n
    for t in range(primes.shape[0]):
        p = primes[t]
        if p * p > m:
            break
        while m % p == 0:
            m //= p
            exps[t] += 1
    if m != 1:
        # leftover may still be one of the primes
        lo, hi = 0, primes.shape[0] - 1
        while lo <= hi:
            mid = (lo + hi) // 2
            if primes[mid] == m:
                exps[mid] += 1
                m = 1
                break
            elif primes[mid] < m:
                lo = mid + 1
            else:
                hi = mid - 1
    return m, exps


if USING_NUMBA:
    enum_collect = njit(cache=True)(enum_collect_py)
    smooth_flags_range = njit(cache=True)(smooth_flags_range_py)
    trial_divide_int64 = njit(cache=True)(trial_divide_py)
else:
    enum_collect = enum_collect_py
    smooth_flags_range = smooth_flags_range_py
    trial_divide_int64 = trial_divide_py
