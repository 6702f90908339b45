"""bosonsim: classical simulation and validation of multiphoton boson sampling.

Generate or ingest interferometer transfer matrices, compute output
probabilities via matrix permanents, draw exact samples under the ideal,
lossy, distinguishable, partially-distinguishable, and uniform models, and
run the Bayesian and row-norm discrimination tests on the results.
"""

from ._version import __version__
from .circuits import (
    BeamSplitter,
    CircuitDescription,
    MeasurementSet,
    PhaseShift,
    compose,
    haar_statistics_test,
    mach_zehnder,
    reconstruct,
    simulate_measurements,
)
from .matrices import (
    TransferMatrix,
    haar_unitary,
    load_matrix,
    matrix_fingerprint,
    save_matrix,
    scattering_submatrix,
    unitarity_deviation,
    unitarity_report,
)
from .metrics import (
    empirical_distribution,
    expected_rate,
    fidelity,
    state_space_size,
    tvd,
)
from .permanents import perm_glynn, perm_naive, perm_ryser, permanent
from .sampling import (
    InputConfig,
    LossSpec,
    SampleSet,
    distinguishable_distribution,
    distribution_partial,
    exact_distribution,
    load_samples,
    lossy_distribution,
    modes_to_occupation,
    occupation_to_modes,
    prob_output,
    sample_boson,
    sample_distinguishable,
    sample_lossy,
    sample_partial,
    sample_uniform,
    save_samples,
    uniform_distribution,
    uniform_gram,
)
from .validation import ValidationTrace, bayes_trace, rne_scores, rne_trace

__all__ = [
    "__version__",
    "BeamSplitter",
    "CircuitDescription",
    "InputConfig",
    "LossSpec",
    "MeasurementSet",
    "PhaseShift",
    "SampleSet",
    "TransferMatrix",
    "ValidationTrace",
    "bayes_trace",
    "compose",
    "distinguishable_distribution",
    "distribution_partial",
    "empirical_distribution",
    "exact_distribution",
    "expected_rate",
    "fidelity",
    "haar_statistics_test",
    "haar_unitary",
    "load_matrix",
    "load_samples",
    "lossy_distribution",
    "mach_zehnder",
    "matrix_fingerprint",
    "modes_to_occupation",
    "occupation_to_modes",
    "perm_glynn",
    "perm_naive",
    "perm_ryser",
    "permanent",
    "prob_output",
    "reconstruct",
    "rne_scores",
    "rne_trace",
    "sample_boson",
    "sample_distinguishable",
    "sample_lossy",
    "sample_partial",
    "sample_uniform",
    "save_matrix",
    "save_samples",
    "scattering_submatrix",
    "simulate_measurements",
    "state_space_size",
    "tvd",
    "uniform_distribution",
    "uniform_gram",
    "unitarity_deviation",
    "unitarity_report",
]
