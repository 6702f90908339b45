"""Numba kernels behind the samplers and exact distributions.

The sequential photon-chain sampler follows the Clifford-Clifford scheme:
uniformly permute the input columns once per draw, then sample output rows
one at a time from the chain of marginal pmfs.  The k-th marginal needs the
permanents of the k x k matrices formed by the rows chosen so far plus one
candidate row; those are obtained from a single Ryser-style pass with a
symbolic last row (`_subperm_coeffs`), for O(n 2^n + m n^2) per draw.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from ._rng import key_u01
from .permanents import _ryser_range


@njit(cache=True, nogil=True)
def _subperm_coeffs(b, k, c):
    """c[j] = permanent of the (k-1) x k matrix b with column j removed.

    Ryser over column subsets with the last (symbolic) row factored out; the
    common (-1)^k sign is dropped since callers only use |.|^2 of linear
    combinations of c.
    """
    for j in range(k):
        c[j] = 0.0 + 0.0j
    if k == 1:
        c[0] = 1.0 + 0.0j
        return
    rowsum = np.zeros(k - 1, dtype=np.complex128)
    parity = 0
    for g in range(1, 1 << k):
        j = 0
        while not (g >> j) & 1:
            j += 1
        if ((g ^ (g >> 1)) >> j) & 1:
            for r in range(k - 1):
                rowsum[r] += b[r, j]
            parity ^= 1
        else:
            for r in range(k - 1):
                rowsum[r] -= b[r, j]
            parity ^= 1
        rho = 1.0 + 0.0j
        for r in range(k - 1):
            rho *= rowsum[r]
        if parity:
            rho = -rho
        s = g ^ (g >> 1)
        while s:
            jj = 0
            while not (s >> jj) & 1:
                jj += 1
            c[jj] += rho
            s &= s - 1


@njit(cache=True, nogil=True)
def _chain_one(a, key, t0, perm, rows, b, c, amp):
    """One sequential draw from the boson distribution of the (m, n) matrix a.

    Writes the chosen output rows (ascending) into rows[:n]; returns the next
    unused variate counter.
    """
    m, n = a.shape
    for i in range(n):
        perm[i] = i
    t = t0
    for i in range(n - 1, 0, -1):
        u = key_u01(key, t)
        t += 1
        j = int(u * (i + 1))
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
    for k in range(1, n + 1):
        for r in range(k - 1):
            for j in range(k):
                b[r, j] = a[rows[r], perm[j]]
        _subperm_coeffs(b, k, c)
        z = 0.0
        for i in range(m):
            s = 0.0 + 0.0j
            for j in range(k):
                s += a[i, perm[j]] * c[j]
            w = s.real * s.real + s.imag * s.imag
            amp[i] = w
            z += w
        u = key_u01(key, t)
        t += 1
        target = u * z
        cum = 0.0
        pick = m - 1
        for i in range(m):
            cum += amp[i]
            if cum > target:
                pick = i
                break
        rows[k - 1] = pick
    rows[:n].sort()
    return t


@njit(cache=True, nogil=True)
def chain_sample_batch(a, keys, out):
    """Boson draws for per-draw keys; out is (N, n) int32, rows ascending."""
    m, n = a.shape
    perm = np.empty(n, dtype=np.int64)
    rows = np.empty(n, dtype=np.int64)
    b = np.empty((n, n), dtype=np.complex128)
    c = np.empty(n, dtype=np.complex128)
    amp = np.empty(m, dtype=np.float64)
    for i in range(keys.shape[0]):
        _chain_one(a, keys[i], 0, perm, rows, b, c, amp)
        for k in range(n):
            out[i, k] = rows[k]


@njit(cache=True, nogil=True)
def lossy_sample_batch(a, n_detect, weights, keys, out):
    """Lossy draws: per draw pick an input subset, then run the photon chain.

    a is the (m, n_sent) matrix of all injected input columns.  With empty
    `weights` the subset is uniform over all C(n_sent, n_detect) choices;
    otherwise photons survive by successive weighted selection without
    replacement.
    """
    m, n_sent = a.shape
    weighted = weights.shape[0] == n_sent
    sel = np.empty(n_sent, dtype=np.int64)
    sub = np.empty((m, n_detect), dtype=np.complex128)
    perm = np.empty(n_detect, dtype=np.int64)
    rows = np.empty(n_detect, dtype=np.int64)
    b = np.empty((n_detect, n_detect), dtype=np.complex128)
    c = np.empty(n_detect, dtype=np.complex128)
    amp = np.empty(m, dtype=np.float64)
    w = np.empty(n_sent, dtype=np.float64)
    for i in range(keys.shape[0]):
        key = keys[i]
        for j in range(n_sent):
            sel[j] = j
        if weighted:
            for j in range(n_sent):
                w[j] = weights[j]
            for t in range(n_detect):
                total = 0.0
                for j in range(t, n_sent):
                    total += w[sel[j]]
                target = key_u01(key, t) * total
                cum = 0.0
                pick = n_sent - 1
                for j in range(t, n_sent):
                    cum += w[sel[j]]
                    if cum > target:
                        pick = j
                        break
                tmp = sel[t]
                sel[t] = sel[pick]
                sel[pick] = tmp
        else:
            # partial Fisher-Yates: first n_detect entries are a uniform subset
            for t in range(n_detect):
                u = key_u01(key, t)
                j = t + int(u * (n_sent - t))
                tmp = sel[t]
                sel[t] = sel[j]
                sel[j] = tmp
        sel[:n_detect].sort()
        for j in range(n_detect):
            for r in range(m):
                sub[r, j] = a[r, sel[j]]
        _chain_one(sub, key, 64, perm, rows, b, c, amp)
        for k in range(n_detect):
            out[i, k] = rows[k]


@njit(cache=True, nogil=True)
def enumerate_outcomes(m, n, total, out):
    """Fill out (total, n) with all ascending output mode lists in colex order."""
    cur = np.zeros(n, dtype=np.int32)
    for i in range(total):
        for k in range(n):
            out[i, k] = cur[k]
        # colex successor: bump the first position that can grow, reset prefix
        pos = -1
        for k in range(n):
            cap = cur[k + 1] if k + 1 < n else m - 1
            if cur[k] < cap:
                pos = k
                break
        if pos < 0:
            break
        cur[pos] += 1
        for k in range(pos):
            cur[k] = 0


@njit(cache=True, nogil=True)
def boson_outcome_probs(a, outcomes, probs, lo, hi):
    """probs[i] = |Perm(a[outcomes[i], :])|^2 / prod(occupation!) for i in [lo, hi)."""
    n = a.shape[1]
    bt = np.empty((n, n), dtype=np.complex128)
    for i in range(lo, hi):
        occ_fact = 1.0
        run = 1
        for k in range(n):
            bt[:, k] = a[outcomes[i, k], :]  # transposed layout for the kernel
            if k > 0 and outcomes[i, k] == outcomes[i, k - 1]:
                run += 1
                occ_fact *= run
            else:
                run = 1
        p = _ryser_range(bt, 1, 1 << n)
        probs[i] = (p.real * p.real + p.imag * p.imag) / occ_fact


@njit(cache=True, nogil=True)
def unrank_combinations(indices, binom, n, limit, offset_multiset, out):
    """Colex unranking of n-subsets of [0, limit); optionally shift to multisets."""
    for i in range(indices.shape[0]):
        r = indices[i]
        c = limit - 1
        for k in range(n, 0, -1):
            while binom[c, k] > r:
                c -= 1
            r -= binom[c, k]
            out[i, k - 1] = c - (k - 1) if offset_multiset else c
            c -= 1
