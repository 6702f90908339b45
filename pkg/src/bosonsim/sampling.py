"""Exact output distributions and samplers for the five photon models.

Models
------
boson             all n injected photons are indistinguishable and detected
distinguishable   photons carry orthogonal internal states (no interference)
uniform           outcomes drawn uniformly from the chosen state space
lossy             n_sent photons injected, a uniform subset of n_detect survives
partial           pairwise partial distinguishability via a Gram matrix

Output states are handled as ascending tuples of occupied output modes (with
repetition encoding collisions); `modes_to_occupation` converts to occupation
vectors.  Exact pmfs are plain dicts keyed by those tuples, in a fixed
colexicographic enumeration order.
"""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._kernels import (
    boson_outcome_probs,
    chain_sample_batch,
    enumerate_outcomes,
    lossy_sample_batch,
    unrank_combinations,
)
from ._rng import check_seed, draw_keys, uniform_indices, uniform_matrix
from ._util import resolve_workers, split_ranges
from ._version import __version__
from .matrices import TransferMatrix, is_unitary, matrix_fingerprint, scattering_submatrix
from .permanents import permanent

BOSON_MAX_PHOTONS = 22          # per-draw 2^n chain cost
PARTIAL_MAX_PHOTONS = 6         # (n!)^2 permutation-pair sum
STATE_SPACE_GUARD = 10**7       # full enumeration bound
UNRANK_SPACE_LIMIT = 2**63      # exact uint64 unranking bound

MODELS = ("boson", "distinguishable", "uniform", "lossy", "partial")


@dataclass(frozen=True)
class InputConfig:
    """Which input modes carry one photon each (collision-free input)."""

    m: int
    modes: tuple

    def __post_init__(self):
        modes = tuple(sorted(int(c) for c in self.modes))
        if len(modes) < 1:
            raise ValueError("input needs at least one photon")
        if len(set(modes)) != len(modes):
            raise ValueError(f"input modes must be distinct, got {modes}")
        if len(modes) > self.m:
            raise ValueError(f"cannot inject {len(modes)} photons into {self.m} modes")
        if modes[0] < 0 or modes[-1] >= self.m:
            raise ValueError(f"input modes {modes} out of range for m={self.m}")
        object.__setattr__(self, "modes", modes)

    @property
    def n(self) -> int:
        return len(self.modes)


@dataclass(frozen=True)
class LossSpec:
    """n_sent photons injected, n_detect coincidences recorded (n_detect < n_sent)."""

    n_sent: int
    n_detect: int

    def __post_init__(self):
        if self.n_detect < 1 or self.n_sent < 1:
            raise ValueError("photon counts must be positive")
        if self.n_detect >= self.n_sent:
            raise ValueError(
                f"lossy model needs n_detect < n_sent, got {self.n_detect} >= {self.n_sent}"
            )


@dataclass
class SampleSet:
    """Ordered draws plus the metadata needed to reproduce them."""

    model: str
    m: int
    input_modes: tuple
    seed: int
    matrix_fingerprint: str
    draws: np.ndarray  # (N, n) int32, each row ascending output modes
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        self.draws = np.asarray(self.draws, dtype=np.int32)
        if self.draws.ndim != 2:
            raise ValueError("draws must be a (N, n) array")

    @property
    def n(self) -> int:
        return self.draws.shape[1]

    def __len__(self) -> int:
        return self.draws.shape[0]


def modes_to_occupation(output_modes, m: int) -> tuple:
    """Ascending mode list -> length-m occupation vector."""
    occ = np.bincount(np.asarray(output_modes, dtype=np.int64), minlength=m)
    return tuple(int(x) for x in occ)


def occupation_to_modes(occupation) -> tuple:
    """Occupation vector -> ascending mode list with repetition."""
    modes = []
    for mode, count in enumerate(occupation):
        if count < 0:
            raise ValueError("occupation numbers must be nonnegative")
        modes.extend([mode] * int(count))
    return tuple(modes)


def _occupation_factorial(sorted_modes) -> float:
    fact = 1.0
    run = 1
    for k in range(1, len(sorted_modes)):
        if sorted_modes[k] == sorted_modes[k - 1]:
            run += 1
            fact *= run
        else:
            run = 1
    return fact


def _unitary_matrix(matrix) -> np.ndarray:
    if isinstance(matrix, TransferMatrix):
        if not matrix.unitary and not is_unitary(matrix):
            raise ValueError("transfer matrix is not unitary within tolerance")
        return matrix.mat
    mat = np.asarray(matrix, dtype=np.complex128)
    if not is_unitary(mat):
        raise ValueError("matrix is not unitary within tolerance")
    return mat


def _fingerprint_of(matrix) -> str:
    if isinstance(matrix, TransferMatrix):
        return matrix.fingerprint
    return matrix_fingerprint(np.asarray(matrix, dtype=np.complex128))


def _input_columns(mat: np.ndarray, config: InputConfig) -> np.ndarray:
    if config.m != mat.shape[0]:
        raise ValueError(f"input is for m={config.m} but matrix has m={mat.shape[0]}")
    return np.ascontiguousarray(mat[:, list(config.modes)])


def state_space(m: int, n: int, collision_free: bool = False) -> int:
    return math.comb(m, n) if collision_free else math.comb(m + n - 1, n)


# ---------------------------------------------------------------------------
# Exact probabilities and distributions
# ---------------------------------------------------------------------------

def prob_output(matrix, config: InputConfig, output_modes) -> float:
    """Probability of one output pattern: |Perm(submatrix)|^2 / prod(occupation!)."""
    mat = _unitary_matrix(matrix)
    rows = sorted(int(r) for r in output_modes)
    if len(rows) != config.n:
        raise ValueError(
            f"photon-count mismatch: {config.n} injected vs {len(rows)} detected"
        )
    sub = scattering_submatrix(mat, config.modes, rows)
    p = permanent(sub)
    return (p.real * p.real + p.imag * p.imag) / _occupation_factorial(rows)


def _enumerated_outcomes(m: int, n: int) -> np.ndarray:
    total = state_space(m, n)
    if total > STATE_SPACE_GUARD:
        raise ValueError(
            f"state space C({m}+{n}-1,{n}) = {total} exceeds the enumeration guard "
            f"({STATE_SPACE_GUARD}); use the samplers instead"
        )
    out = np.empty((total, n), dtype=np.int32)
    enumerate_outcomes(m, n, total, out)
    return out


def _pmf_from_arrays(outcomes: np.ndarray, probs: np.ndarray, tol: float = 1e-9) -> dict:
    mass = float(np.sum(probs))
    if abs(mass - 1.0) > tol:
        raise ValueError(
            f"distribution mass {mass!r} deviates from 1 beyond {tol}; "
            "matrix is not unitary enough for exact enumeration"
        )
    probs = probs / mass
    return {tuple(row): float(p) for row, p in zip(outcomes.tolist(), probs)}


def exact_distribution(matrix, config: InputConfig, workers: int | None = 1) -> dict:
    """Exact boson pmf over all output patterns (collisions included).

    Enumerates occupations in colexicographic order; the total mass must be
    within 1e-9 of 1 (a unitarity integration check) before renormalization.
    """
    mat = _unitary_matrix(matrix)
    a = _input_columns(mat, config)
    outcomes = _enumerated_outcomes(config.m, config.n)
    probs = np.empty(outcomes.shape[0], dtype=np.float64)
    workers = resolve_workers(workers)
    ranges = split_ranges(0, outcomes.shape[0], workers)
    if len(ranges) <= 1:
        boson_outcome_probs(a, outcomes, probs, 0, outcomes.shape[0])
    else:
        with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
            list(pool.map(lambda r: boson_outcome_probs(a, outcomes, probs, r[0], r[1]), ranges))
    return _pmf_from_arrays(outcomes, probs)


def distinguishable_distribution(matrix, config: InputConfig) -> dict:
    """Exact pmf for fully distinguishable photons: Perm(|M|^2) / prod(occupation!)."""
    mat = _unitary_matrix(matrix)
    w = np.abs(_input_columns(mat, config)) ** 2
    outcomes = _enumerated_outcomes(config.m, config.n)
    probs = np.empty(outcomes.shape[0], dtype=np.float64)
    for i, row in enumerate(outcomes):
        sub = w[row, :]
        probs[i] = permanent(sub.astype(np.complex128)).real / _occupation_factorial(row)
    return _pmf_from_arrays(outcomes, probs)


def uniform_distribution(m: int, n: int, space: str = "collision_free") -> dict:
    """Uniform pmf over the chosen output space."""
    collision_free = _space_flag(space)
    if collision_free:
        outcomes = itertools.combinations(range(m), n)
        total = math.comb(m, n)
    else:
        outcomes = map(tuple, _enumerated_outcomes(m, n).tolist())
        total = state_space(m, n)
    if total > STATE_SPACE_GUARD:
        raise ValueError(f"uniform space of size {total} exceeds the enumeration guard")
    p = 1.0 / total
    return {out: p for out in outcomes}


def lossy_distribution(matrix, config: InputConfig, loss: LossSpec, workers: int | None = 1) -> dict:
    """Exact lossy pmf: uniform mixture of boson pmfs over surviving input subsets."""
    if loss.n_sent != config.n:
        raise ValueError(f"loss spec sends {loss.n_sent} photons but input has {config.n}")
    subsets = list(itertools.combinations(config.modes, loss.n_detect))
    mix: dict = {}
    for sub in subsets:
        pmf = exact_distribution(matrix, InputConfig(config.m, sub), workers=workers)
        for k, v in pmf.items():
            mix[k] = mix.get(k, 0.0) + v / len(subsets)
    return mix


# ---------------------------------------------------------------------------
# Partial distinguishability
# ---------------------------------------------------------------------------

def validate_gram(gram: np.ndarray, n: int, tol: float = 1e-10) -> np.ndarray:
    """Check Hermiticity, unit diagonal, and positive semidefiniteness."""
    s = np.asarray(gram, dtype=np.complex128)
    if s.shape != (n, n):
        raise ValueError(f"Gram matrix must be {n}x{n}, got {s.shape}")
    if not np.allclose(s, s.conj().T, atol=tol):
        raise ValueError("Gram matrix must be Hermitian")
    if not np.allclose(np.diagonal(s).real, 1.0, atol=tol) or np.any(
        np.abs(np.diagonal(s).imag) > tol
    ):
        raise ValueError("Gram matrix must have unit diagonal")
    try:
        np.linalg.cholesky(s + tol * np.eye(n))
    except np.linalg.LinAlgError:
        raise ValueError("Gram matrix must be positive semidefinite") from None
    return s


def uniform_gram(n: int, indistinguishability: float) -> np.ndarray:
    """Gram matrix for n photons with uniform pairwise indistinguishability x.

    x is the measured two-photon interference visibility, i.e. the squared
    modulus of the internal-state overlap, so off-diagonal entries are
    sqrt(x).  x = 1 recovers ideal bosons, x = 0 fully distinguishable ones.
    """
    if not 0.0 <= indistinguishability <= 1.0:
        raise ValueError(f"indistinguishability must be in [0, 1], got {indistinguishability}")
    r = math.sqrt(indistinguishability)
    s = np.full((n, n), r, dtype=np.complex128)
    np.fill_diagonal(s, 1.0)
    return s


def distribution_partial(matrix, config: InputConfig, gram: np.ndarray) -> dict:
    """Exact pmf for partially distinguishable photons.

    P(out) = (1 / prod occ!) * sum over permutation pairs (sigma, tau) of
    prod_k S[tau(k), sigma(k)] * M[k, sigma(k)] * conj(M[k, tau(k)]), with M
    the scattering submatrix.  The all-ones Gram recovers the boson pmf, the
    identity Gram the distinguishable pmf.
    """
    mat = _unitary_matrix(matrix)
    n = config.n
    if n > PARTIAL_MAX_PHOTONS:
        raise ValueError(
            f"partial-distinguishability pmf is limited to n <= {PARTIAL_MAX_PHOTONS} "
            f"((n!)^2 permutation pairs), got n = {n}"
        )
    s = validate_gram(gram, n)
    a = _input_columns(mat, config)
    outcomes = _enumerated_outcomes(config.m, n)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    # G[tau, sigma] = prod_k S[tau(k), sigma(k)]; the M-dependent factors
    # separate per permutation, so each outcome costs one quadratic form
    g = np.prod(s[perms[:, None, :], perms[None, :, :]], axis=-1)
    idx = np.arange(n)
    probs = np.empty(outcomes.shape[0], dtype=np.float64)
    for i, row in enumerate(outcomes):
        sub = a[row, :]
        b = np.prod(sub[idx, perms], axis=1)
        val = complex(np.conj(b) @ (g @ b))
        if abs(val.imag) > 1e-10:
            raise ValueError(
                f"partial probability has imaginary residue {val.imag:.3e} > 1e-10"
            )
        probs[i] = val.real / _occupation_factorial(row)
    return _pmf_from_arrays(outcomes, probs)


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------

def _chunked_kernel(kernel_call, count: int, workers: int) -> None:
    ranges = split_ranges(0, count, workers)
    if len(ranges) <= 1:
        kernel_call(0, count)
        return
    with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
        list(pool.map(lambda r: kernel_call(r[0], r[1]), ranges))


def sample_boson(
    matrix,
    config: InputConfig,
    count: int,
    seed: int,
    workers: int | None = 1,
    start: int = 0,
) -> SampleSet:
    """Draw i.i.d. samples from the exact boson distribution.

    Per-sample cost is O(n 2^n + m n^2) via the sequential photon chain, so
    the feasible regime is bounded by photons (n <= 22), not by the size of
    the output space.  Draw i depends only on (seed, i): results are
    bit-identical for any worker count, and `start` selects a window of the
    draw sequence for streamed generation.
    """
    mat = _unitary_matrix(matrix)
    if config.n > BOSON_MAX_PHOTONS:
        raise ValueError(f"boson sampler is limited to n <= {BOSON_MAX_PHOTONS} photons")
    a = _input_columns(mat, config)
    keys = draw_keys(check_seed(seed), start, count)
    out = np.empty((count, config.n), dtype=np.int32)
    workers = resolve_workers(workers)
    _chunked_kernel(lambda lo, hi: chain_sample_batch(a, keys[lo:hi], out[lo:hi]), count, workers)
    return SampleSet("boson", config.m, config.modes, seed, _fingerprint_of(matrix), out)


def sample_distinguishable(
    matrix, config: InputConfig, count: int, seed: int, start: int = 0
) -> SampleSet:
    """Each photon lands independently with probability |U[i, c_j]|^2 (O(n) per draw)."""
    mat = _unitary_matrix(matrix)
    w = np.abs(_input_columns(mat, config)) ** 2
    cdf = np.cumsum(w, axis=0)
    cdf /= cdf[-1, :]
    u = uniform_matrix(check_seed(seed), start, count, config.n)
    out = np.empty((count, config.n), dtype=np.int32)
    for j in range(config.n):
        out[:, j] = np.searchsorted(cdf[:, j], u[:, j], side="right")
    out.sort(axis=1)
    return SampleSet(
        "distinguishable", config.m, config.modes, seed, _fingerprint_of(matrix), out
    )


def _space_flag(space: str) -> bool:
    key = space.replace("-", "_")
    if key == "collision_free":
        return True
    if key == "full":
        return False
    raise ValueError(f"unknown output space {space!r} (expected collision_free or full)")


def sample_uniform(
    m: int, n: int, count: int, seed: int, space: str = "collision_free", start: int = 0
) -> SampleSet:
    """Uniform draws over the collision-free or full output space by unranking."""
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= n <= m, got n={n}, m={m}")
    collision_free = _space_flag(space)
    size = state_space(m, n, collision_free)
    if size >= UNRANK_SPACE_LIMIT:
        raise ValueError(f"state space {size} too large for exact 64-bit unranking")
    limit = m if collision_free else m + n - 1
    binom = np.zeros((limit + 1, n + 1), dtype=np.uint64)
    for c in range(limit + 1):
        for k in range(n + 1):
            binom[c, k] = math.comb(c, k)
    idx = uniform_indices(check_seed(seed), count, size, start=start)
    out = np.empty((count, n), dtype=np.int32)
    unrank_combinations(idx, binom, n, limit, not collision_free, out)
    return SampleSet(
        "uniform",
        m,
        (),
        seed,
        "",
        out,
        params={"space": "collision_free" if collision_free else "full"},
    )


def sample_lossy(
    matrix,
    config: InputConfig,
    loss: LossSpec,
    count: int,
    seed: int,
    weights=None,
    workers: int | None = 1,
    start: int = 0,
) -> SampleSet:
    """Lossy draws: per draw, a random n_detect-subset of the injected photons
    survives (uniform by default, or weighted without replacement), then one
    boson sample is drawn from that sub-input."""
    mat = _unitary_matrix(matrix)
    if loss.n_sent != config.n:
        raise ValueError(f"loss spec sends {loss.n_sent} photons but input has {config.n}")
    if loss.n_detect > BOSON_MAX_PHOTONS:
        raise ValueError(f"lossy sampler is limited to n_detect <= {BOSON_MAX_PHOTONS}")
    if weights is None:
        w = np.empty(0, dtype=np.float64)
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (config.n,) or np.any(w <= 0):
            raise ValueError("weights must be positive, one per input mode")
    a = _input_columns(mat, config)
    keys = draw_keys(check_seed(seed), start, count)
    out = np.empty((count, loss.n_detect), dtype=np.int32)
    workers = resolve_workers(workers)
    _chunked_kernel(
        lambda lo, hi: lossy_sample_batch(a, loss.n_detect, w, keys[lo:hi], out[lo:hi]),
        count,
        workers,
    )
    params = {"n_detect": loss.n_detect}
    if weights is not None:
        params["weights"] = [float(x) for x in w]
    return SampleSet("lossy", config.m, config.modes, seed, _fingerprint_of(matrix), out, params)


def sample_partial(
    matrix,
    config: InputConfig,
    gram: np.ndarray,
    count: int,
    seed: int,
    start: int = 0,
) -> SampleSet:
    """Draws from the partial-distinguishability pmf by inverse CDF."""
    pmf = distribution_partial(matrix, config, gram)
    outcomes = np.array(list(pmf.keys()), dtype=np.int32)
    cdf = np.cumsum(np.fromiter(pmf.values(), dtype=np.float64))
    cdf /= cdf[-1]
    u = uniform_matrix(check_seed(seed), start, count, 1)[:, 0]
    picks = np.searchsorted(cdf, u, side="right")
    s = validate_gram(gram, config.n)
    return SampleSet(
        "partial",
        config.m,
        config.modes,
        seed,
        _fingerprint_of(matrix),
        outcomes[picks],
        params={"gram_re": s.real.tolist(), "gram_im": s.imag.tolist()},
    )


# ---------------------------------------------------------------------------
# Sample persistence (JSON lines, 1-based modes in files)
# ---------------------------------------------------------------------------

def save_samples(path, samples: SampleSet) -> None:
    """Write a JSONL file: header line, then one {"i", "out"} line per draw."""
    header = {
        "model": samples.model,
        "m": samples.m,
        "n": samples.n,
        "input": [c + 1 for c in samples.input_modes],
        "seed": samples.seed,
        "matrix_hash": samples.matrix_fingerprint,
        "version": __version__,
    }
    if samples.params:
        header["params"] = samples.params
    with open(path, "w") as fh:
        fh.write(json.dumps(header) + "\n")
        for i, row in enumerate(samples.draws.tolist()):
            fh.write(json.dumps({"i": i, "out": [r + 1 for r in row]}) + "\n")


def load_samples(path) -> SampleSet:
    with open(path) as fh:
        header = json.loads(fh.readline())
        try:
            model = header["model"]
            m = int(header["m"])
            n = int(header["n"])
            input_modes = tuple(int(c) - 1 for c in header["input"])
            seed = int(header["seed"])
            fingerprint = header["matrix_hash"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed sample header in {path}: {exc}") from None
        draws = []
        for line in fh:
            rec = json.loads(line)
            out = rec["out"]
            if len(out) != n:
                raise ValueError(f"draw {rec.get('i')} has {len(out)} photons, expected {n}")
            draws.append([r - 1 for r in out])
    arr = np.asarray(draws, dtype=np.int32).reshape(len(draws), n)
    return SampleSet(model, m, input_modes, seed, fingerprint, arr, header.get("params", {}))
