"""Sample-efficient discrimination tests for boson-sampler output.

`bayes_trace` runs the sequential likelihood-ratio test of the
indistinguishable-boson hypothesis against the distinguishable-photon
hypothesis; `rne_trace` scores draws with the row-norm estimator, a cheap
permanent-free statistic that separates boson samples from uniform ones.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ._version import __version__
from .matrices import scattering_submatrix
from .permanents import permanent
from .sampling import InputConfig, SampleSet, _occupation_factorial, _unitary_matrix


@dataclass(frozen=True)
class ValidationTrace:
    """Per-draw running statistic for discrimination plots."""

    kind: str  # "bayes_confidence" | "rne_score_fraction"
    indices: np.ndarray  # 1-based draw indices
    values: np.ndarray   # running statistic after each draw
    raw: np.ndarray      # per-draw raw values (log-odds / R scores)

    def final(self) -> float:
        return float(self.values[-1])


def _boson_likelihood(mat: np.ndarray, input_modes, rows) -> float:
    sub = scattering_submatrix(mat, input_modes, rows)
    p = permanent(sub)
    return (p.real * p.real + p.imag * p.imag) / _occupation_factorial(rows)


def _distinguishable_likelihood(mat: np.ndarray, input_modes, rows) -> float:
    sub = np.abs(scattering_submatrix(mat, input_modes, rows)) ** 2
    return permanent(sub.astype(np.complex128)).real / _occupation_factorial(rows)


def _draw_likelihoods(mat, config: InputConfig, samples: SampleSet, rows):
    if samples.model == "lossy":
        # mixture over surviving input subsets, uniform weights (matches the
        # lossy sampler)
        subsets = list(itertools.combinations(config.modes, samples.n))
        lq = sum(_boson_likelihood(mat, sub, rows) for sub in subsets) / len(subsets)
        ld = sum(_distinguishable_likelihood(mat, sub, rows) for sub in subsets) / len(subsets)
        return lq, ld
    return (
        _boson_likelihood(mat, config.modes, rows),
        _distinguishable_likelihood(mat, config.modes, rows),
    )


def bayes_trace(matrix, config: InputConfig, samples: SampleSet) -> ValidationTrace:
    """Sequential Bayesian confidence that the draws come from indistinguishable
    bosons rather than distinguishable photons.

    With equal priors, after each draw x the odds are updated by the
    likelihood ratio P_boson(x) / P_distinguishable(x); the emitted statistic
    is the posterior confidence chi / (1 + chi).  Log-odds are maintained
    internally so long traces cannot overflow.
    """
    mat = _unitary_matrix(matrix)
    n = len(samples)
    if n == 0:
        raise ValueError("empty sample set")
    log_odds = np.empty(n, dtype=np.float64)
    acc = 0.0
    for i, rows in enumerate(samples.draws.tolist()):
        lq, ld = _draw_likelihoods(mat, config, samples, rows)
        if lq == 0.0 and ld == 0.0:
            raise ValueError(
                f"draw {i} is impossible under both hypotheses; "
                "matrix or input does not match the samples"
            )
        with np.errstate(divide="ignore"):
            acc += (math.log(lq) if lq > 0.0 else -math.inf) - (
                math.log(ld) if ld > 0.0 else -math.inf
            )
        if math.isnan(acc):
            raise ValueError(f"contradictory zero-likelihood draws up to index {i}")
        log_odds[i] = acc
    return ValidationTrace(
        "bayes_confidence",
        np.arange(1, n + 1),
        expit(log_odds),
        log_odds,
    )


def rne_scores(matrix, config: InputConfig, samples: SampleSet) -> np.ndarray:
    """Row-norm estimator per draw: R = prod_k (m/n) sum_{j in input} |U[d_k, c_j]|^2.

    O(m n) per draw, no permanents.  Under unitarity the single-photon R has
    mean exactly 1 over uniform draws; boson draws favour large row norms.
    """
    mat = _unitary_matrix(matrix)
    if config.m != samples.m:
        raise ValueError(f"input is for m={config.m} but samples have m={samples.m}")
    n = samples.n
    row_norms = np.sum(np.abs(mat[:, list(config.modes)]) ** 2, axis=1)
    scaled = (samples.m / n) * row_norms
    return np.prod(scaled[samples.draws], axis=1)


def rne_trace(matrix, config: InputConfig, samples: SampleSet) -> ValidationTrace:
    """Running fraction of draws with row-norm estimator R > 1."""
    r = rne_scores(matrix, config, samples)
    n = r.size
    idx = np.arange(1, n + 1)
    return ValidationTrace("rne_score_fraction", idx, np.cumsum(r > 1.0) / idx, r)


def save_trace(path, trace: ValidationTrace, paired: ValidationTrace | None = None) -> None:
    """Trace CSV `draw_index, statistic` (plus a paired column when given)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if paired is None:
            writer.writerow(["draw_index", "statistic"])
            for i, v in zip(trace.indices.tolist(), trace.values.tolist()):
                writer.writerow([i, repr(v)])
        else:
            if len(paired.values) != len(trace.values):
                raise ValueError("paired traces must have equal length")
            writer.writerow(["draw_index", "statistic", "paired_statistic"])
            for i, v, w in zip(
                trace.indices.tolist(), trace.values.tolist(), paired.values.tolist()
            ):
                writer.writerow([i, repr(v), repr(w)])


def save_trace_metadata(path, trace: ValidationTrace, matrix_hash: str, extra: dict | None = None) -> None:
    """Companion JSON recording the hypothesis pair and provenance."""
    hypotheses = {
        "bayes_confidence": ["indistinguishable-boson", "distinguishable-photon"],
        "rne_score_fraction": ["boson", "uniform"],
    }[trace.kind]
    doc = {
        "version": __version__,
        "statistic": trace.kind,
        "hypotheses": hypotheses,
        "priors": [0.5, 0.5] if trace.kind == "bayes_confidence" else None,
        "matrix_hash": matrix_hash,
        "draws": int(trace.indices[-1]) if trace.indices.size else 0,
        "final_statistic": trace.final() if trace.indices.size else None,
    }
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
