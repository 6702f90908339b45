"""Beam-splitter meshes, transfer-matrix reconstruction, Haar-statistics tests.

A beam splitter on modes (a, b) with transmissivity t and phase phi acts as
the 2x2 block ``[[sqrt(t), e^{i phi} sqrt(1-t)], [-e^{-i phi} sqrt(1-t),
sqrt(t)]]`` embedded in the identity; mirrors are plain phase flips and never
appear as separate ops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ._version import __version__
from .matrices import TransferMatrix

PHASE_GAUGE_ROW0COL0 = "row0col0"


@dataclass(frozen=True)
class BeamSplitter:
    mode_a: int
    mode_b: int
    transmissivity: float
    phase: float = 0.0

    def __post_init__(self):
        if self.mode_a == self.mode_b:
            raise ValueError("beam splitter needs two distinct modes")
        if not 0.0 <= self.transmissivity <= 1.0:
            raise ValueError(f"transmissivity must be in [0, 1], got {self.transmissivity}")
        if not -math.pi < self.phase <= math.pi:
            raise ValueError(f"phase must be in (-pi, pi], got {self.phase}")

    def block(self) -> np.ndarray:
        t = self.transmissivity
        rt, rr = math.sqrt(t), math.sqrt(1.0 - t)
        e = np.exp(1j * self.phase)
        return np.array([[rt, e * rr], [-np.conj(e) * rr, rt]])


@dataclass(frozen=True)
class PhaseShift:
    mode: int
    phase: float


@dataclass(frozen=True)
class CircuitDescription:
    """Ordered list of beam splitters and phase shifts on m modes."""

    m: int
    ops: tuple

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("mode count must be >= 1")
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            modes = (op.mode_a, op.mode_b) if isinstance(op, BeamSplitter) else (op.mode,)
            for mode in modes:
                if not 0 <= mode < self.m:
                    raise ValueError(f"op mode {mode} out of range for m={self.m}")


def compose(circuit: CircuitDescription) -> TransferMatrix:
    """Multiply the embedded 2x2 blocks in listed order; the result is unitary."""
    u = np.eye(circuit.m, dtype=np.complex128)
    for op in circuit.ops:
        if isinstance(op, BeamSplitter):
            rows = [op.mode_a, op.mode_b]
            u[rows, :] = op.block() @ u[rows, :]
        elif isinstance(op, PhaseShift):
            u[op.mode, :] *= np.exp(1j * op.phase)
        else:
            raise ValueError(f"unknown circuit op {op!r}")
    return TransferMatrix(u, unitary=True)


def mach_zehnder(internal_phase: float, m: int = 2, modes=(0, 1)) -> CircuitDescription:
    """Two balanced splitters with a phase on the first arm between them."""
    a, b = modes
    return CircuitDescription(
        m,
        (
            BeamSplitter(a, b, 0.5),
            PhaseShift(a, internal_phase),
            BeamSplitter(a, b, 0.5),
        ),
    )


# ---------------------------------------------------------------------------
# Reconstruction from measured amplitudes and phases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasurementSet:
    """Per-element measured moduli and phases plus detector efficiencies.

    amplitudes[i, j] is the count-derived modulus for output mode i and input
    mode j (any common per-column scale is allowed; reconstruction
    renormalizes).  detector_efficiencies[i] applies to output mode i.
    """

    amplitudes: np.ndarray
    phases: np.ndarray
    detector_efficiencies: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=np.float64)
        ph = np.asarray(self.phases, dtype=np.float64)
        eff = np.asarray(self.detector_efficiencies, dtype=np.float64)
        if amp.ndim != 2 or amp.shape[0] != amp.shape[1]:
            raise ValueError(f"amplitudes must be square, got {amp.shape}")
        m = amp.shape[0]
        if ph.shape != (m, m):
            raise ValueError(f"phases shape {ph.shape} does not match amplitudes {amp.shape}")
        if eff.shape != (m,):
            raise ValueError(f"need {m} detector efficiencies, got shape {eff.shape}")
        if np.any(amp < 0) or not np.all(np.isfinite(amp)):
            raise ValueError("amplitudes must be finite and nonnegative")
        if not np.all(np.isfinite(ph)):
            raise ValueError("phases must be finite")
        if np.any(eff <= 0) or np.any(eff > 1):
            raise ValueError("detector efficiencies must lie in (0, 1]")
        for name, arr in (("amplitudes", amp), ("phases", ph), ("detector_efficiencies", eff)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def m(self) -> int:
        return self.amplitudes.shape[0]


def reconstruct(meas: MeasurementSet, normalization: str = "column") -> TransferMatrix:
    """Build a transfer matrix from measured amplitudes and phases.

    Rows are divided by sqrt(detector efficiency), then amplitudes are
    normalized (per column to unit 2-norm by default, or by a single global
    scale), phases are attached, and the row0/col0 phase gauge is applied.
    The result is deliberately not flagged unitary; score it with
    `unitarity_deviation`.
    """
    amp = meas.amplitudes / np.sqrt(meas.detector_efficiencies)[:, None]
    col_norms = np.linalg.norm(amp, axis=0)
    dead = np.flatnonzero(col_norms == 0.0)
    if dead.size:
        raise ValueError(f"no light recorded for input mode {dead[0] + 1}")
    if normalization == "column":
        amp = amp / col_norms
    elif normalization == "global":
        amp = amp * math.sqrt(meas.m) / np.linalg.norm(amp)
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    mat = amp * np.exp(1j * meas.phases)
    # phases are only defined relative to reference paths; fix the gauge so
    # row 0 and column 0 are real nonnegative
    mat = mat * np.exp(-1j * np.angle(mat[:, 0]))[:, None]
    mat = mat * np.exp(-1j * np.angle(mat[0, :]))[None, :]
    return TransferMatrix(
        mat,
        unitary=False,
        phase_gauge=PHASE_GAUGE_ROW0COL0,
        normalization=normalization,
    )


def simulate_measurements(
    matrix: TransferMatrix,
    detector_efficiencies=None,
    amplitude_noise: float = 0.0,
    seed: int = 0,
) -> MeasurementSet:
    """Forward model of the calibration measurement for a known matrix.

    Amplitudes are sqrt(eff_i) * |U_ij| with optional additive Gaussian noise
    at `amplitude_noise` of full scale (columns of a unitary have unit norm);
    phases are the element phases.
    """
    m = matrix.m
    eff = np.ones(m) if detector_efficiencies is None else np.asarray(detector_efficiencies, float)
    amp = np.sqrt(eff)[:, None] * np.abs(matrix.mat)
    if amplitude_noise > 0.0:
        rng = np.random.default_rng(seed)
        amp = np.clip(amp + amplitude_noise * rng.standard_normal((m, m)), 0.0, None)
    return MeasurementSet(amp, np.angle(matrix.mat), eff)


def save_measurements(amplitudes_path, phases_path, efficiencies_path, meas: MeasurementSet) -> None:
    """Write the three CSV files (row = output mode; efficiencies one per line)."""
    np.savetxt(amplitudes_path, meas.amplitudes, delimiter=",")
    np.savetxt(phases_path, meas.phases, delimiter=",")
    np.savetxt(efficiencies_path, meas.detector_efficiencies, delimiter=",")


def load_measurements(amplitudes_path, phases_path, efficiencies_path) -> MeasurementSet:
    amp = np.atleast_2d(np.loadtxt(amplitudes_path, delimiter=","))
    ph = np.atleast_2d(np.loadtxt(phases_path, delimiter=","))
    eff = np.atleast_1d(np.loadtxt(efficiencies_path, delimiter=","))
    return MeasurementSet(amp, ph, eff)


# ---------------------------------------------------------------------------
# Haar-measure statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HaarStatisticsReport:
    amplitude_pvalue: float
    phase_pvalue: float
    amplitude_hist: tuple
    phase_hist: tuple
    n_amplitude: int
    n_phase: int

    def as_dict(self) -> dict:
        return {
            "amplitude_pvalue": self.amplitude_pvalue,
            "phase_pvalue": self.phase_pvalue,
            "n_amplitude": self.n_amplitude,
            "n_phase": self.n_phase,
        }


def haar_amplitude_cdf(r, m: int):
    """CDF of |u| for one entry of an m-mode Haar unitary: 1 - (1 - r^2)^(m-1)."""
    r = np.clip(np.asarray(r, dtype=np.float64), 0.0, 1.0)
    return 1.0 - (1.0 - r**2) ** (m - 1)


def haar_statistics_test(matrix: TransferMatrix, bins: int = 40) -> HaarStatisticsReport:
    """KS-test element moduli and phases against the Haar-measure marginals.

    Moduli are tested against f(r) = 2(m-1) r (1-r^2)^(m-2) and phases
    against the uniform distribution on (-pi, pi].  For gauge-fixed matrices
    the first row and column carry no phase information and are excluded
    from the phase sample.
    """
    m = matrix.m
    if m < 8:
        raise ValueError(f"haar_statistics_test needs m >= 8, got m = {m}")
    moduli = np.abs(matrix.mat).ravel()
    if matrix.phase_gauge == PHASE_GAUGE_ROW0COL0:
        phases = np.angle(matrix.mat[1:, 1:]).ravel()
    else:
        phases = np.angle(matrix.mat).ravel()
    amp_p = stats.kstest(moduli, lambda r: haar_amplitude_cdf(r, m)).pvalue
    phase_p = stats.kstest(phases, stats.uniform(loc=-np.pi, scale=2 * np.pi).cdf).pvalue
    amp_hist = np.histogram(moduli, bins=bins, range=(0.0, 1.0))
    phase_hist = np.histogram(phases, bins=bins, range=(-np.pi, np.pi))
    return HaarStatisticsReport(
        amplitude_pvalue=float(amp_p),
        phase_pvalue=float(phase_p),
        amplitude_hist=(amp_hist[0].tolist(), amp_hist[1].tolist()),
        phase_hist=(phase_hist[0].tolist(), phase_hist[1].tolist()),
        n_amplitude=moduli.size,
        n_phase=phases.size,
    )


# ---------------------------------------------------------------------------
# Circuit file format (used by the CLI)
# ---------------------------------------------------------------------------

def circuit_to_dict(circuit: CircuitDescription) -> dict:
    ops = []
    for op in circuit.ops:
        if isinstance(op, BeamSplitter):
            ops.append(
                {
                    "type": "bs",
                    "modes": [op.mode_a + 1, op.mode_b + 1],
                    "transmissivity": op.transmissivity,
                    "phase": op.phase,
                }
            )
        else:
            ops.append({"type": "phase", "mode": op.mode + 1, "phase": op.phase})
    return {"m": circuit.m, "ops": ops, "meta": {"version": __version__}}


def circuit_from_dict(doc: dict) -> CircuitDescription:
    try:
        m = int(doc["m"])
        raw_ops = doc["ops"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed circuit description: {exc}") from None
    ops = []
    for raw in raw_ops:
        kind = raw.get("type")
        if kind == "bs":
            a, b = raw["modes"]
            ops.append(
                BeamSplitter(int(a) - 1, int(b) - 1, float(raw["transmissivity"]), float(raw.get("phase", 0.0)))
            )
        elif kind == "phase":
            ops.append(PhaseShift(int(raw["mode"]) - 1, float(raw["phase"])))
        else:
            raise ValueError(f"unknown circuit op type {kind!r}")
    return CircuitDescription(m, tuple(ops))
