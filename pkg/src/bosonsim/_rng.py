"""Stateless counter-based random streams for reproducible parallel sampling.

Every draw gets its own key derived from (master seed, draw index) through a
SplitMix64-style mixer, so the i-th draw is identical no matter how draws are
batched across workers.  Kernels consume variates as ``key_u01(key, t)`` with a
local counter t; vectorized numpy paths use ``uniform_matrix``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_SEED_TWEAK = np.uint64(0xD1B54A32D192ED03)
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True)
def mix64(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True, nogil=True)
def key_u01(key, t):
    """t-th uniform variate in [0, 1) of the stream identified by `key`."""
    x = mix64(key + _GOLDEN * np.uint64(t + 1))
    return (x >> np.uint64(11)) * _INV_2_53


def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def check_seed(seed: int) -> int:
    if not 0 <= int(seed) < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return int(seed)


def draw_keys(seed: int, start: int, count: int) -> np.ndarray:
    """Per-draw stream keys for draw indices [start, start + count)."""
    check_seed(seed)
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix64_np((np.uint64(seed) ^ _SEED_TWEAK) + _GOLDEN * idx)


def uniform_matrix(seed: int, start: int, count: int, width: int) -> np.ndarray:
    """(count, width) uniforms in [0, 1); row i holds variates of draw start+i."""
    keys = draw_keys(seed, start, count)
    t = np.arange(1, width + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = _mix64_np(keys[:, None] + _GOLDEN * t[None, :])
    return (x >> np.uint64(11)) * _INV_2_53


def uniform_indices(seed: int, count: int, size: int, start: int = 0) -> np.ndarray:
    """Unbiased uniform integers in [0, size) for draw indices [start, start+count).

    Uses rejection below the largest multiple of `size` (never more than one
    extra variate in expectation); 0 < size < 2**63.
    """
    if not 0 < size < 2**63:
        raise ValueError(f"index space size out of range: {size}")
    keys = draw_keys(seed, start, count)
    size_u = np.uint64(size)
    rem = 2**64 % size
    out = np.empty(count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        if rem == 0:  # size is a power of two: no modulo bias to reject
            return _mix64_np(keys + _GOLDEN) % size_u
        limit = np.uint64(2**64 - rem)
        pending = np.arange(count)
        t = np.uint64(1)
        while pending.size:
            x = _mix64_np(keys[pending] + _GOLDEN * t)
            ok = x < limit
            out[pending[ok]] = x[ok] % size_u
            pending = pending[~ok]
            t += np.uint64(1)
    return out
