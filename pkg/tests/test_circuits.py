import json

import numpy as np
import pytest

from bosonsim.circuits import (
    BeamSplitter,
    CircuitDescription,
    MeasurementSet,
    PhaseShift,
    circuit_from_dict,
    circuit_to_dict,
    compose,
    haar_statistics_test,
    load_measurements,
    mach_zehnder,
    reconstruct,
    save_measurements,
    simulate_measurements,
)
from bosonsim.matrices import haar_unitary, unitarity_deviation


def test_compose_empty_is_identity():
    u = compose(CircuitDescription(4, ()))
    assert np.array_equal(u.mat, np.eye(4))
    assert u.unitary


def test_compose_balanced_splitter_block():
    u = compose(CircuitDescription(2, (BeamSplitter(0, 1, 0.5),)))
    expected = np.array([[1, 1], [-1, 1]]) / np.sqrt(2)
    assert np.max(np.abs(u.mat - expected)) < 1e-15


def test_compose_mach_zehnder_bar_state():
    # two balanced splitters with internal phase pi: B @ diag(-1, 1) @ B
    # multiplies out to diag(-1, 1), so the moduli are the identity's
    u = compose(mach_zehnder(np.pi))
    assert np.max(np.abs(np.abs(u.mat) - np.eye(2))) < 1e-12
    assert np.max(np.abs(u.mat - np.diag([-1.0, 1.0]))) < 1e-12


def test_compose_embeds_on_chosen_modes():
    u = compose(CircuitDescription(5, (BeamSplitter(1, 3, 0.5),)))
    untouched = [0, 2, 4]
    assert np.array_equal(u.mat[np.ix_(untouched, untouched)], np.eye(3))


def test_compose_rejects_out_of_range():
    with pytest.raises(ValueError):
        CircuitDescription(2, (BeamSplitter(0, 2, 0.5),))


def test_compose_preserves_unitarity_long_circuit():
    rng = np.random.default_rng(4)
    m = 12
    ops = []
    for _ in range(10_000):
        a, b = rng.choice(m, size=2, replace=False)
        ops.append(BeamSplitter(int(a), int(b), float(rng.uniform(0, 1)), float(rng.uniform(-np.pi, np.pi))))
        if rng.random() < 0.1:
            ops.append(PhaseShift(int(rng.integers(m)), float(rng.uniform(-np.pi, np.pi))))
    u = compose(CircuitDescription(m, tuple(ops)))
    assert unitarity_deviation(u) < 1e-12


def test_circuit_json_round_trip():
    circuit = CircuitDescription(
        3, (BeamSplitter(0, 2, 0.3, 0.7), PhaseShift(1, -1.1), BeamSplitter(1, 2, 0.5))
    )
    doc = circuit_to_dict(circuit)
    assert circuit_from_dict(json.loads(json.dumps(doc))) == circuit


# ---------------------------------------------------------------------------
# Reconstruction
# ---------------------------------------------------------------------------

def gauge_fixed_moduli_match(a, b, tol):
    return np.max(np.abs(np.abs(a) - np.abs(b))) < tol


def test_reconstruct_noiseless_round_trip():
    u = haar_unitary(16, 5)
    meas = simulate_measurements(u)
    rec = reconstruct(meas)
    assert not rec.unitary
    assert rec.phase_gauge == "row0col0"
    assert unitarity_deviation(rec) < 1e-10
    assert gauge_fixed_moduli_match(rec.mat, u.mat, 1e-10)
    # gauge: first row and column real nonnegative
    assert np.max(np.abs(np.angle(rec.mat[:, 0]))) < 1e-12
    assert np.max(np.abs(np.angle(rec.mat[0, :]))) < 1e-12


def test_reconstruct_corrects_detector_efficiencies():
    rng = np.random.default_rng(8)
    u = haar_unitary(16, 6)
    eff = rng.uniform(0.6, 0.82, size=16)
    rec = reconstruct(simulate_measurements(u, detector_efficiencies=eff))
    assert gauge_fixed_moduli_match(rec.mat, u.mat, 1e-10)
    assert unitarity_deviation(rec) < 1e-10


def test_reconstruct_global_normalization():
    u = haar_unitary(12, 6)
    rec = reconstruct(simulate_measurements(u), normalization="global")
    assert rec.normalization == "global"
    assert unitarity_deviation(rec) < 1e-10


def test_reconstruct_zero_column_names_input():
    u = haar_unitary(4, 6)
    meas = simulate_measurements(u)
    amp = meas.amplitudes.copy()
    amp[:, 2] = 0.0
    with pytest.raises(ValueError, match="input mode 3"):
        reconstruct(MeasurementSet(amp, meas.phases, meas.detector_efficiencies))


def test_reconstruct_amplitude_noise_sets_deviation_scale():
    # 1% of full scale (unit column norm) additive amplitude noise shows up
    # as an off-diagonal mean of order 0.01
    u = haar_unitary(60, 7)
    devs = []
    for trial in range(8):
        meas = simulate_measurements(u, amplitude_noise=0.01, seed=trial)
        devs.append(unitarity_deviation(reconstruct(meas)))
    mean_dev = np.mean(devs)
    assert 0.01 / 3 < mean_dev < 0.01 * 3


def test_measurement_set_validation():
    with pytest.raises(ValueError):
        MeasurementSet(np.ones((3, 3)), np.zeros((2, 2)), np.ones(3))
    with pytest.raises(ValueError):
        MeasurementSet(np.ones((3, 3)), np.zeros((3, 3)), np.zeros(3))
    with pytest.raises(ValueError):
        MeasurementSet(-np.ones((3, 3)), np.zeros((3, 3)), np.ones(3))


def test_measurement_csv_round_trip(tmp_path):
    u = haar_unitary(6, 9)
    meas = simulate_measurements(u, detector_efficiencies=np.full(6, 0.75))
    paths = [tmp_path / name for name in ("a.csv", "p.csv", "e.csv")]
    save_measurements(*paths, meas)
    loaded = load_measurements(*paths)
    assert np.allclose(loaded.amplitudes, meas.amplitudes, atol=1e-15)
    assert np.allclose(loaded.phases, meas.phases, atol=1e-15)
    assert np.allclose(loaded.detector_efficiencies, meas.detector_efficiencies)


# ---------------------------------------------------------------------------
# Haar statistics
# ---------------------------------------------------------------------------

def test_haar_statistics_calibration():
    # Haar matrices should pass both KS tests at alpha = 0.01 nearly always
    passes = 0
    for seed in range(100):
        rep = haar_statistics_test(haar_unitary(60, 2000 + seed))
        if rep.amplitude_pvalue > 0.01 and rep.phase_pvalue > 0.01:
            passes += 1
    assert passes >= 95


def test_haar_statistics_rejects_identity_amplitudes():
    from bosonsim.matrices import TransferMatrix

    rep = haar_statistics_test(TransferMatrix(np.eye(60, dtype=complex)))
    assert rep.amplitude_pvalue < 1e-6


def test_haar_statistics_rejects_zeroed_phases():
    from bosonsim.matrices import TransferMatrix

    moduli = np.abs(haar_unitary(60, 3).mat)
    rep = haar_statistics_test(TransferMatrix(moduli.astype(complex)))
    assert rep.phase_pvalue < 1e-6


def test_haar_statistics_permutation_invariant():
    u = haar_unitary(24, 4)
    rng = np.random.default_rng(0)
    from bosonsim.matrices import TransferMatrix

    permuted = TransferMatrix(u.mat[rng.permutation(24), :][:, rng.permutation(24)])
    a = haar_statistics_test(u)
    b = haar_statistics_test(permuted)
    assert a.amplitude_pvalue == b.amplitude_pvalue
    assert a.phase_pvalue == b.phase_pvalue


def test_haar_statistics_guard():
    with pytest.raises(ValueError):
        haar_statistics_test(haar_unitary(4, 0))


def test_haar_statistics_histograms_consistent():
    u = haar_unitary(16, 5)
    rep = haar_statistics_test(u, bins=25)
    amp_counts, amp_edges = rep.amplitude_hist
    ph_counts, ph_edges = rep.phase_hist
    assert sum(amp_counts) == rep.n_amplitude == 256
    assert sum(ph_counts) == rep.n_phase == 256
    assert len(amp_counts) == 25 and len(amp_edges) == 26
    assert amp_edges[0] == 0.0 and amp_edges[-1] == 1.0
    assert ph_edges[0] == pytest.approx(-np.pi) and ph_edges[-1] == pytest.approx(np.pi)


def test_haar_statistics_masks_gauge_fixed_phases():
    rec = reconstruct(simulate_measurements(haar_unitary(60, 11)))
    rep = haar_statistics_test(rec)
    assert rep.n_phase == 59 * 59
    assert rep.phase_pvalue > 0.01
    assert rep.amplitude_pvalue > 0.01
