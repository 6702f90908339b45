import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bosonsim.matrices import haar_unitary
from bosonsim.metrics import (
    compare,
    empirical_distribution,
    expected_rate,
    fidelity,
    load_pmf,
    save_pmf,
    sparse_regime,
    state_space_size,
    tvd,
)
from bosonsim.sampling import InputConfig, SampleSet, exact_distribution, sample_boson


def test_identical_pmfs():
    p = {(0,): 0.25, (1,): 0.75}
    assert fidelity(p, p) == pytest.approx(1.0, abs=1e-12)
    assert tvd(p, p) == 0.0


def test_disjoint_pmfs():
    assert fidelity({("a",): 1.0}, {("b",): 1.0}) == 0.0
    assert tvd({("a",): 1.0}, {("b",): 1.0}) == 1.0


def test_missing_outcomes_count_as_zero():
    p = {(0,): 0.5, (1,): 0.5}
    q = {(0,): 1.0}
    assert tvd(p, q) == pytest.approx(0.5)
    assert fidelity(p, q) == pytest.approx(math.sqrt(0.5))


@given(st.integers(0, 2**32 - 1), st.integers(2, 30))
@settings(max_examples=60, deadline=None)
def test_fuchs_van_de_graaf_bounds(seed, k):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(k))
    q = rng.dirichlet(np.ones(k))
    pd = {(i,): float(v) for i, v in enumerate(p)}
    qd = {(i,): float(v) for i, v in enumerate(q)}
    f = fidelity(pd, qd)
    d = tvd(pd, qd)
    assert 0.0 <= f <= 1.0 + 1e-12
    assert 0.0 <= d <= 1.0 + 1e-12
    assert 1.0 - f <= d + 1e-9
    assert d <= math.sqrt(max(0.0, 1.0 - f * f)) + 1e-9


def test_empirical_distribution_trivials():
    s = SampleSet("uniform", 4, (), 0, "", np.array([[1, 2]] * 7, dtype=np.int32))
    assert empirical_distribution(s) == {(1, 2): 1.0}
    s2 = SampleSet("uniform", 4, (), 0, "", np.array([[0, 1], [2, 3]] * 5, dtype=np.int32))
    emp = empirical_distribution(s2)
    assert emp[(0, 1)] == pytest.approx(0.5)
    assert emp[(2, 3)] == pytest.approx(0.5)
    with pytest.raises(ValueError):
        empirical_distribution(SampleSet("uniform", 4, (), 0, "", np.empty((0, 2))))


def test_empirical_matches_exact_at_scale():
    u = haar_unitary(6, 3)
    cfg = InputConfig(6, (0, 2, 4))
    s = sample_boson(u, cfg, 100_000, seed=1)
    f, d = compare(exact_distribution(u, cfg), s)
    assert f > 0.99
    assert d < 0.02


def test_sparse_regime_warning():
    u = haar_unitary(6, 3)
    cfg = InputConfig(6, (0, 2, 4))
    s = sample_boson(u, cfg, 50, seed=1)
    with pytest.warns(UserWarning, match="biased"):
        compare(exact_distribution(u, cfg), s)
    assert sparse_regime(50, 56)
    assert not sparse_regime(10_000, 56)


# ---------------------------------------------------------------------------
# State-space accounting (exact integers)
# ---------------------------------------------------------------------------

def test_state_space_known_values():
    assert state_space_size(60, 2, "collision_free") == 1770
    assert state_space_size(60, 2, "full") == 1830
    assert state_space_size(4, 2, "full") == 10
    big = state_space_size(60, 14, "full")  # C(73, 14)
    assert isinstance(big, int)
    assert round(big / 1e13) == 37  # ~3.7e14


def test_state_space_single_photon_is_m():
    for m in (1, 7, 60):
        assert state_space_size(m, 1, "full") == m
        assert state_space_size(m, 1, "collision_free") == m


def test_state_space_pascal_recurrence():
    rng = np.random.default_rng(5)
    for _ in range(100):
        m = int(rng.integers(2, 80))
        n = int(rng.integers(2, 25))
        full = state_space_size(m, n, "full")
        assert full == state_space_size(m - 1, n, "full") + state_space_size(m, n - 1, "full")


def test_hilbert_dimension_accounting():
    x = 60**20
    lg = math.log2(x)
    assert abs(lg - 20 * math.log2(60)) < 1e-9
    assert round(lg) == 118
    assert state_space_size(60, 20, "full") == math.comb(79, 20)
    assert state_space_size(60, 20, "full") > 10**18


# ---------------------------------------------------------------------------
# Coincidence-rate model
# ---------------------------------------------------------------------------

def test_rate_single_photon():
    assert expected_rate(1e6, 1, 1, 0.5) == pytest.approx(5e5)


def test_rate_binomial_completeness():
    total = sum(expected_rate(1e6, 6, k, 0.37) for k in range(7))
    assert total == pytest.approx(1e6, rel=1e-12)


def test_rate_loss_tolerance_ratio():
    # rate(n of n+1) / rate(n of n) = (n+1)(1-eta) at fixed pulse rate
    eta, pulse = 0.13, 1e6
    for n in (3, 5, 9):
        ratio = expected_rate(pulse, n + 1, n, eta) / expected_rate(pulse, n, n, eta)
        assert ratio == pytest.approx((n + 1) * (1 - eta), rel=1e-12)


def test_rate_two_point_efficiency_fit():
    # a 76 MHz pulse train demultiplexed 20 ways feeds each input at 3.8 MHz;
    # solving eta separately from (5 photons, 295 Hz) and (10 photons,
    # 0.01 Hz) must give consistent values that cross-reproduce both rates
    pulse = 76e6 / 20
    eta5 = (295.0 / pulse) ** (1 / 5)
    eta10 = (0.01 / pulse) ** (1 / 10)
    assert abs(eta5 / eta10 - 1.0) < 0.15
    eta = math.sqrt(eta5 * eta10)
    assert 0.10 < eta < 0.17
    assert expected_rate(pulse, 5, 5, eta) == pytest.approx(295.0, rel=1.0)
    assert expected_rate(pulse, 10, 10, eta) == pytest.approx(0.01, rel=1.0)


def test_rate_validation():
    with pytest.raises(ValueError):
        expected_rate(1e6, 2, 3, 0.5)
    with pytest.raises(ValueError):
        expected_rate(1e6, 2, 1, 1.5)


# ---------------------------------------------------------------------------
# Pmf CSV
# ---------------------------------------------------------------------------

def test_pmf_csv_round_trip(tmp_path):
    u = haar_unitary(5, 9)
    pmf = exact_distribution(u, InputConfig(5, (0, 3)))
    path = tmp_path / "pmf.csv"
    save_pmf(path, pmf)
    loaded = load_pmf(path)
    assert set(loaded) == set(pmf)
    for key, p in pmf.items():
        assert loaded[key] == p
    lines = path.read_text().splitlines()
    assert lines[0] == "outcome_modes,probability"
    assert lines[1].startswith("1-1,")  # ascending outcome rank, 1-based modes
