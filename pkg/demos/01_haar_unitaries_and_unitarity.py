"""Haar-random transfer matrices and how we score unitarity.

Generates interferometer unitaries of increasing size, shows the unitarity
statistics, and checks the element statistics against the Haar-measure
predictions (amplitude density 2(m-1) r (1-r^2)^(m-2), uniform phases).
"""

import numpy as np

from bosonsim import haar_statistics_test, haar_unitary, unitarity_report

# ----------------------------------------------------------------------
# Generation is deterministic in (modes, seed)
# ----------------------------------------------------------------------
u = haar_unitary(60, seed=7)
again = haar_unitary(60, seed=7)
print("deterministic:", np.array_equal(u.mat, again.mat))

rep = unitarity_report(u)
print(f"mean off-diagonal |(U^H U)_ij| : {rep.off_diagonal_mean:.2e}")
print(f"max diagonal deviation         : {rep.diagonal_max_deviation:.2e}")
print(f"spectral norm of U^H U - I     : {rep.spectral_norm:.2e}")

# ----------------------------------------------------------------------
# A Haar matrix should look Haar: KS tests on moduli and phases
# ----------------------------------------------------------------------
stats = haar_statistics_test(u)
print(f"amplitude KS p-value: {stats.amplitude_pvalue:.3f}  (n={stats.n_amplitude})")
print(f"phase     KS p-value: {stats.phase_pvalue:.3f}  (n={stats.n_phase})")

# the first moment E|u_ij|^2 = 1/m, here checked across seeds for one entry
m = 60
vals = [abs(haar_unitary(m, seed).mat[0, 0]) ** 2 for seed in range(200)]
print(f"E|u_00|^2 over 200 seeds: {np.mean(vals):.5f}  (expect {1/m:.5f})")

# ----------------------------------------------------------------------
# Histograms for plotting live in the report (bin counts + edges)
# ----------------------------------------------------------------------
counts, edges = stats.amplitude_hist
peak = np.argmax(counts)
print(f"amplitude histogram peaks in [{edges[peak]:.3f}, {edges[peak+1]:.3f})")
print(f"typical |u| is ~1/sqrt(m) = {1/np.sqrt(m):.3f}")
