"""The permanent kernels and their cost.

Permanents drive every probability in the toolkit.  perm_naive enumerates all
n! permutations and serves as the oracle; perm_ryser and perm_glynn are
independent O(n 2^n) kernels that agree with it to 1e-9 relative and with
each other well past the oracle's reach.
"""

import time

import numpy as np

from bosonsim import perm_glynn, perm_naive, perm_ryser, permanent
from bosonsim.permanents import benchmark

rng = np.random.default_rng(3)

# analytic anchors
print("Perm(I_4)      =", perm_naive(np.eye(4, dtype=complex)))
print("Perm(ones 3x3) =", perm_naive(np.ones((3, 3), dtype=complex)), "(= 3!)")
hom = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
print("Perm(HOM 2x2)  =", abs(perm_naive(hom)), "(two-photon suppression)")

# oracle agreement
a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
expected = perm_naive(a)
print(f"n=8 relative errors: ryser {abs(perm_ryser(a)-expected)/abs(expected):.1e}, "
      f"glynn {abs(perm_glynn(a)-expected)/abs(expected):.1e}")

# the n=20 regime: feasible per-permanent, hopeless per-distribution
a20 = rng.standard_normal((20, 20)) + 1j * rng.standard_normal((20, 20))
permanent(a20)  # warm the JIT before timing
t0 = time.perf_counter()
p = permanent(a20)
dt = time.perf_counter() - t0
print(f"one n=20 permanent: {dt*1e3:.1f} ms (|p| = {abs(p):.3e})")

# worker splitting partitions the subset index space into contiguous ranges
p1 = perm_ryser(a20, workers=1)
p8 = perm_ryser(a20, workers=8)
print(f"ryser 1 vs 8 workers: relative difference {abs(p1-p8)/abs(p1):.1e}")

# scaling table (nanoseconds per kernel)
print("\n n      ryser          glynn")
for n, rows in zip((10, 14, 18, 20), zip(*[iter(benchmark((10, 14, 18, 20)))] * 2)):
    by = {kernel: ns for _, kernel, ns in rows}
    print(f"{n:3d} {by['ryser']:12,} ns {by['glynn']:12,} ns")
