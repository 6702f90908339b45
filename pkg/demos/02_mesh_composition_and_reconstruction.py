"""Building unitaries from beam-splitter meshes and reconstructing them from
measured amplitude/phase data.

A Mach-Zehnder interferometer shows the composition conventions; the second
half forward-simulates a calibration measurement of a 60-mode Haar matrix
(single-input illumination for amplitudes, two-path interference for phases),
reconstructs the transfer matrix, and looks at how amplitude noise shows up in
the unitarity test.
"""

import numpy as np

from bosonsim import (
    BeamSplitter,
    CircuitDescription,
    PhaseShift,
    compose,
    haar_unitary,
    reconstruct,
    simulate_measurements,
    unitarity_deviation,
)
from bosonsim.circuits import mach_zehnder

# ----------------------------------------------------------------------
# Mesh composition
# ----------------------------------------------------------------------
splitter = compose(CircuitDescription(2, (BeamSplitter(0, 1, 0.5),)))
print("balanced splitter:\n", np.round(splitter.mat, 3))

for phase, label in ((np.pi, "bar"), (0.0, "cross")):
    mz = compose(mach_zehnder(phase))
    print(f"MZ internal phase {phase:+.2f} -> |U| =\n", np.round(np.abs(mz.mat), 3), f"({label} state)")

# a long random mesh stays unitary to machine precision
rng = np.random.default_rng(0)
ops = []
for _ in range(5000):
    a, b = rng.choice(10, size=2, replace=False)
    ops.append(BeamSplitter(int(a), int(b), float(rng.uniform()), float(rng.uniform(-np.pi, np.pi))))
    ops.append(PhaseShift(int(rng.integers(10)), float(rng.uniform(-np.pi, np.pi))))
big = compose(CircuitDescription(10, tuple(ops)))
print(f"10-mode mesh, {len(ops)} ops: unitarity deviation {unitarity_deviation(big):.2e}")

# ----------------------------------------------------------------------
# Reconstruction from measurements
# ----------------------------------------------------------------------
u = haar_unitary(60, seed=11)
eff = np.random.default_rng(1).uniform(0.6, 0.82, size=60)  # detector efficiencies

noiseless = reconstruct(simulate_measurements(u, detector_efficiencies=eff))
print(f"noiseless reconstruction: deviation {unitarity_deviation(noiseless):.2e}")
print(f"moduli error vs truth   : {np.max(np.abs(np.abs(noiseless.mat) - np.abs(u.mat))):.2e}")
print(f"phase gauge             : {noiseless.phase_gauge} (row 0 / column 0 real)")

for sigma in (0.002, 0.01, 0.05):
    devs = [
        unitarity_deviation(
            reconstruct(simulate_measurements(u, detector_efficiencies=eff,
                                              amplitude_noise=sigma, seed=t))
        )
        for t in range(5)
    ]
    print(f"amplitude noise {sigma:.3f} of full scale -> deviation {np.mean(devs):.4f}")
