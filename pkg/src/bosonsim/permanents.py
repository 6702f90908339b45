"""Matrix permanents: a factorial-time oracle and two O(n 2^n) production kernels.

`perm_naive` enumerates permutations and exists to pin down the fast kernels;
`perm_ryser` and `perm_glynn` are independent inclusion-exclusion kernels with
Gray-code single-flip updates.  Both kernels accept a `workers` argument that
partitions the subset index space into contiguous ranges; each range rebuilds
its Gray-code prefix independently, so the result does not depend on the
worker count beyond floating-point reassociation (bounded by the blockwise
compensated summation to ~1e-9 relative).
"""

from __future__ import annotations

import functools
import itertools
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numba import njit

from ._util import resolve_workers, split_ranges

NAIVE_MAX_N = 9
KERNEL_MAX_N = 30

_BLOCK = 4096


def _checked(a: np.ndarray, max_n: int, what: str) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{what} needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n < 1:
        raise ValueError(f"{what} needs n >= 1")
    if n > max_n:
        raise ValueError(f"{what} is limited to n <= {max_n}, got n = {n}")
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise ValueError("matrix contains non-finite entries")
    return a


@functools.lru_cache(maxsize=NAIVE_MAX_N)
def _permutation_table(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))))


def perm_naive(a: np.ndarray) -> complex:
    """Permanent by explicit permutation sum; exact up to float rounding, n <= 9."""
    a = _checked(a, NAIVE_MAX_N, "perm_naive")
    n = a.shape[0]
    return complex(np.prod(a[np.arange(n), _permutation_table(n)], axis=1).sum())


@njit(cache=True, nogil=True, fastmath=True)
def _ryser_block(at, rs_re, rs_im, g0, g1, parity):
    # Plain-summed block of Ryser terms over subset indices [g0, g1).
    # at[j] is column j of the original matrix; rowsum state is carried.
    n = at.shape[0]
    tot_re = 0.0
    tot_im = 0.0
    for g in range(g0, g1):
        j = 0
        while not (g >> j) & 1:
            j += 1
        if ((g ^ (g >> 1)) >> j) & 1:
            for r in range(n):
                rs_re[r] += at[j, r].real
                rs_im[r] += at[j, r].imag
        else:
            for r in range(n):
                rs_re[r] -= at[j, r].real
                rs_im[r] -= at[j, r].imag
        parity ^= 1
        p_re = 1.0
        p_im = 0.0
        for r in range(n):
            t = p_re * rs_re[r] - p_im * rs_im[r]
            p_im = p_re * rs_im[r] + p_im * rs_re[r]
            p_re = t
        if parity:
            tot_re -= p_re
            tot_im -= p_im
        else:
            tot_re += p_re
            tot_im += p_im
    return tot_re, tot_im, parity


@njit(cache=True, nogil=True)
def _ryser_range(at, lo, hi):
    # Sum of signed Ryser terms over subset indices [lo, hi) of [1, 2^n),
    # with block-level Kahan compensation.  Caller applies the (-1)^n factor.
    n = at.shape[0]
    rs_re = np.zeros(n, dtype=np.float64)
    rs_im = np.zeros(n, dtype=np.float64)
    g_prev = (lo - 1) ^ ((lo - 1) >> 1)
    parity = 0
    for j in range(n):
        if (g_prev >> j) & 1:
            parity ^= 1
            for r in range(n):
                rs_re[r] += at[j, r].real
                rs_im[r] += at[j, r].imag
    tot_re = 0.0
    tot_im = 0.0
    c_re = 0.0
    c_im = 0.0
    g = lo
    while g < hi:
        g2 = min(g + _BLOCK, hi)
        b_re, b_im, parity = _ryser_block(at, rs_re, rs_im, g, g2, parity)
        y = b_re - c_re
        t = tot_re + y
        c_re = (t - tot_re) - y
        tot_re = t
        y = b_im - c_im
        t = tot_im + y
        c_im = (t - tot_im) - y
        tot_im = t
        g = g2
    return complex(tot_re, tot_im)


@njit(cache=True, nogil=True, fastmath=True)
def _glynn_block(a, cs_re, cs_im, g0, g1, parity):
    # Plain-summed block of Glynn terms over delta indices [g0, g1).
    n = a.shape[0]
    tot_re = 0.0
    tot_im = 0.0
    for g in range(g0, g1):
        i = 0
        while not (g >> i) & 1:
            i += 1
        flip = i + 1  # delta_0 is pinned to +1; gray bit i drives row i+1
        if ((g ^ (g >> 1)) >> i) & 1:
            for j in range(n):
                cs_re[j] -= 2.0 * a[flip, j].real
                cs_im[j] -= 2.0 * a[flip, j].imag
        else:
            for j in range(n):
                cs_re[j] += 2.0 * a[flip, j].real
                cs_im[j] += 2.0 * a[flip, j].imag
        parity ^= 1
        p_re = 1.0
        p_im = 0.0
        for j in range(n):
            t = p_re * cs_re[j] - p_im * cs_im[j]
            p_im = p_re * cs_im[j] + p_im * cs_re[j]
            p_re = t
        if parity:
            tot_re -= p_re
            tot_im -= p_im
        else:
            tot_re += p_re
            tot_im += p_im
    return tot_re, tot_im, parity


@njit(cache=True, nogil=True)
def _glynn_range(a, lo, hi):
    # Sum of signed Glynn terms over delta indices [lo, hi) of [0, 2^(n-1)).
    # Caller divides by 2^(n-1).
    n = a.shape[0]
    cs_re = np.zeros(n, dtype=np.float64)
    cs_im = np.zeros(n, dtype=np.float64)
    g_prev = lo ^ (lo >> 1)
    parity = 0
    for i in range(1, n):
        if (g_prev >> (i - 1)) & 1:
            parity ^= 1
    for j in range(n):
        for i in range(n):
            if i >= 1 and (g_prev >> (i - 1)) & 1:
                cs_re[j] -= a[i, j].real
                cs_im[j] -= a[i, j].imag
            else:
                cs_re[j] += a[i, j].real
                cs_im[j] += a[i, j].imag
    # term at index lo itself, then Gray-walk the rest
    p_re = 1.0
    p_im = 0.0
    for j in range(n):
        t = p_re * cs_re[j] - p_im * cs_im[j]
        p_im = p_re * cs_im[j] + p_im * cs_re[j]
        p_re = t
    if parity:
        tot_re = -p_re
        tot_im = -p_im
    else:
        tot_re = p_re
        tot_im = p_im
    c_re = 0.0
    c_im = 0.0
    g = lo + 1
    while g < hi:
        g2 = min(g + _BLOCK, hi)
        b_re, b_im, parity = _glynn_block(a, cs_re, cs_im, g, g2, parity)
        y = b_re - c_re
        t = tot_re + y
        c_re = (t - tot_re) - y
        tot_re = t
        y = b_im - c_im
        t = tot_im + y
        c_im = (t - tot_im) - y
        tot_im = t
        g = g2
    return complex(tot_re, tot_im)


def _ranged_sum(kernel, arr, lo, hi, workers):
    if workers == 1:
        return kernel(arr, lo, hi)
    ranges = split_ranges(lo, hi, workers)
    with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
        partials = list(pool.map(lambda r: kernel(arr, r[0], r[1]), ranges))
    total = 0.0 + 0.0j
    for p in partials:  # fixed range order keeps the fold deterministic
        total += p
    return total


def perm_ryser(a: np.ndarray, workers: int | None = 1) -> complex:
    """Permanent via Ryser inclusion-exclusion with Gray-code updates, n <= 30."""
    a = _checked(a, KERNEL_MAX_N, "perm_ryser")
    n = a.shape[0]
    workers = resolve_workers(workers)
    at = np.ascontiguousarray(a.T)
    s = _ranged_sum(_ryser_range, at, 1, 1 << n, workers)
    return s if n % 2 == 0 else -s


def perm_glynn(a: np.ndarray, workers: int | None = 1) -> complex:
    """Permanent via Glynn's +/-1 formula with Gray-code updates, n <= 30."""
    a = _checked(a, KERNEL_MAX_N, "perm_glynn")
    n = a.shape[0]
    if n == 1:
        return complex(a[0, 0])
    workers = resolve_workers(workers)
    a = np.ascontiguousarray(a)
    s = _ranged_sum(_glynn_range, a, 0, 1 << (n - 1), workers)
    return s / 2.0 ** (n - 1)


_KERNELS = {"ryser": perm_ryser, "glynn": perm_glynn, "naive": perm_naive}


def permanent(a: np.ndarray, workers: int | None = 1, kernel: str = "glynn") -> complex:
    """Compute a permanent with the chosen kernel (default: Glynn, the fastest)."""
    if kernel == "naive":
        return perm_naive(a)
    try:
        f = _KERNELS[kernel]
    except KeyError:
        raise ValueError(f"unknown permanent kernel {kernel!r}") from None
    return f(a, workers=workers)


def benchmark(ns, kernels=("ryser", "glynn"), workers: int | None = 1, seed: int = 0):
    """Time one permanent per (n, kernel); returns rows of (n, kernel, nanoseconds)."""
    rng = np.random.default_rng(seed)
    rows = []
    for n in ns:
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        for kernel in kernels:
            permanent(a, workers=workers, kernel=kernel)  # warm the JIT
            t0 = time.perf_counter_ns()
            permanent(a, workers=workers, kernel=kernel)
            rows.append((n, kernel, time.perf_counter_ns() - t0))
    return rows


def benchmark_csv(path, ns, kernels=("ryser", "glynn"), workers: int | None = 1) -> None:
    rows = benchmark(ns, kernels=kernels, workers=workers)
    with open(path, "w") as fh:
        fh.write("n,kernel,nanoseconds\n")
        for n, kernel, dt in rows:
            fh.write(f"{n},{kernel},{dt}\n")
