"""Scoring and accounting: fidelity, total variation distance, state-space
sizes (exact big integers), empirical distributions, and the coincidence-rate
model.

Fidelity F = sum_i sqrt(p_i q_i) and distance D = sum_i |p_i - q_i| / 2 are
classical measures between pmfs over the same outcome space (missing entries
count as zero).  Both lie in [0, 1] with F = 1 iff p = q iff D = 0.
"""

from __future__ import annotations

import csv
import math
import warnings

import numpy as np

from .sampling import SampleSet

SPARSE_BIAS_FACTOR = 10  # warn when draws < factor * space size


def _support(p: dict, q: dict):
    return set(p) | set(q)


def fidelity(p: dict, q: dict) -> float:
    """F = sum_i sqrt(p_i q_i) over the union of supports."""
    return float(sum(math.sqrt(p[k] * q[k]) for k in p.keys() & q.keys()))


def tvd(p: dict, q: dict) -> float:
    """D = sum_i |p_i - q_i| / 2 over the union of supports."""
    return 0.5 * float(sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in _support(p, q)))


def empirical_distribution(samples: SampleSet) -> dict:
    """Frequency estimate over the observed outcomes of a sample set."""
    if len(samples) == 0:
        raise ValueError("cannot build an empirical distribution from zero draws")
    outcomes, counts = np.unique(samples.draws, axis=0, return_counts=True)
    total = counts.sum()
    return {tuple(row): c / total for row, c in zip(outcomes.tolist(), counts.tolist())}


def sparse_regime(n_draws: int, space_size: int) -> bool:
    """Plug-in F/D estimates are biased when draws barely cover the space."""
    return n_draws < SPARSE_BIAS_FACTOR * space_size


def compare(exact: dict, samples: SampleSet, space_size: int | None = None):
    """(fidelity, distance) of a sample set against an exact pmf, with a bias
    warning in the sparse regime."""
    if space_size is None:
        space_size = len(exact)
    if sparse_regime(len(samples), space_size):
        warnings.warn(
            f"{len(samples)} draws over a space of {space_size} outcomes: "
            "plug-in fidelity/distance estimates are biased low/high",
            stacklevel=2,
        )
    emp = empirical_distribution(samples)
    return fidelity(exact, emp), tvd(exact, emp)


def state_space_size(m: int, n: int, space: str = "full") -> int:
    """Number of output patterns: C(m+n-1, n) with collisions, C(m, n) without.

    Exact arbitrary-precision integers; these grow past 10^14 in the regimes
    of interest.
    """
    if m < 1 or n < 1:
        raise ValueError(f"need m, n >= 1, got m={m}, n={n}")
    key = space.replace("-", "_")
    if key == "full":
        return math.comb(m + n - 1, n)
    if key == "collision_free":
        return math.comb(m, n)
    raise ValueError(f"unknown space {space!r} (expected full or collision_free)")


def expected_rate(pulse_rate: float, n_sent: int, n_detect: int, eta: float) -> float:
    """Coincidence rate of detecting exactly n_detect of n_sent photons.

    rate = pulse_rate * C(n_sent, n_detect) * eta^n_detect * (1-eta)^(n_sent-n_detect)
    with a single per-photon end-to-end efficiency eta.
    """
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must be in (0, 1), got {eta}")
    if n_detect > n_sent or n_detect < 0 or n_sent < 1:
        raise ValueError(f"need 0 <= n_detect <= n_sent, got {n_detect}, {n_sent}")
    return (
        pulse_rate
        * math.comb(n_sent, n_detect)
        * eta**n_detect
        * (1.0 - eta) ** (n_sent - n_detect)
    )


def _colex_key(modes):
    return tuple(reversed(modes))


def save_pmf(path, pmf: dict) -> None:
    """CSV export `outcome_modes, probability`, rows in ascending outcome rank,
    outcome modes 1-based and dash-joined."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["outcome_modes", "probability"])
        for modes in sorted(pmf.keys(), key=_colex_key):
            writer.writerow(["-".join(str(c + 1) for c in modes), repr(pmf[modes])])


def load_pmf(path) -> dict:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        head = next(reader)
        if head[:2] != ["outcome_modes", "probability"]:
            raise ValueError(f"unexpected pmf CSV header {head}")
        return {
            tuple(int(c) - 1 for c in row[0].split("-")): float(row[1]) for row in reader
        }
