"""Transfer matrices: Haar-random generation, unitarity statistics, submatrices.

Conventions used throughout the toolkit:

* rows index output modes, columns index input modes;
* mode indices are 0-based in code and 1-based in all user-facing I/O;
* a matrix flagged ``unitary`` deviates from unitarity by at most
  ``UNITARY_ACCEPT_TOL`` (generated unitaries meet the stricter
  ``UNITARY_GENERATED_TOL``).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._rng import check_seed
from ._version import __version__

UNITARY_ACCEPT_TOL = 1e-10
UNITARY_GENERATED_TOL = 1e-12


@dataclass(frozen=True)
class TransferMatrix:
    """Complex m x m transfer matrix of an m-mode linear-optical network.

    Parameters
    ----------
    mat : np.ndarray
        Square complex matrix; row = output mode, column = input mode.
    unitary : bool
        Set by constructors that guarantee unitarity (generation, mesh
        composition).  Reconstructed matrices are left unflagged and scored
        with `unitarity_deviation`.
    phase_gauge : str or None
        Phase-gauge tag (e.g. ``"row0col0"``) when the element phases are
        only defined relative to reference paths.
    normalization : str or None
        How measured amplitudes were normalized (``"column"`` or ``"global"``).
    """

    mat: np.ndarray
    unitary: bool = False
    phase_gauge: str | None = None
    normalization: str | None = None

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"transfer matrix must be square, got shape {mat.shape}")
        if mat.shape[0] < 1:
            raise ValueError("mode count must be >= 1")
        if not (np.all(np.isfinite(mat.real)) and np.all(np.isfinite(mat.imag))):
            raise ValueError("transfer matrix contains non-finite entries")
        if self.unitary and not is_unitary(mat):
            raise ValueError(
                f"matrix flagged unitary deviates beyond {UNITARY_ACCEPT_TOL}"
            )
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "mat", mat)

    @property
    def m(self) -> int:
        return self.mat.shape[0]

    @property
    def fingerprint(self) -> str:
        return matrix_fingerprint(self.mat)


def matrix_fingerprint(mat: np.ndarray) -> str:
    """64-bit content hash (16 hex chars) of a complex matrix, platform-stable."""
    mat = np.ascontiguousarray(mat, dtype="<c16")
    h = hashlib.sha256()
    h.update(b"tmat:%d:" % mat.shape[0])
    h.update(mat.tobytes())
    return h.hexdigest()[:16]


def haar_unitary(m: int, seed: int) -> TransferMatrix:
    """Draw an m x m unitary from the Haar measure, deterministically in (m, seed).

    Standard construction: fill with i.i.d. standard complex Gaussians, QR,
    then fix phases so the triangular factor has positive real diagonal.
    """
    if m < 1:
        raise ValueError(f"mode count must be >= 1, got {m}")
    rng = np.random.default_rng(check_seed(seed))
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return TransferMatrix(q, unitary=True)


@dataclass(frozen=True)
class UnitarityReport:
    """Deviation of M†M from the identity, split into the published statistic
    (mean off-diagonal magnitude) and stricter secondary measures."""

    off_diagonal_mean: float
    diagonal_max_deviation: float
    spectral_norm: float


def unitarity_report(matrix: TransferMatrix | np.ndarray) -> UnitarityReport:
    mat = matrix.mat if isinstance(matrix, TransferMatrix) else np.asarray(matrix)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("unitarity test needs a square matrix")
    m = mat.shape[0]
    p = mat.conj().T @ mat
    off = ~np.eye(m, dtype=bool)
    off_mean = float(np.abs(p[off]).mean()) if m > 1 else 0.0
    diag_dev = float(np.abs(np.diagonal(p) - 1.0).max())
    spec = float(np.linalg.norm(p - np.eye(m), ord=2))
    return UnitarityReport(off_mean, diag_dev, spec)


def unitarity_deviation(matrix: TransferMatrix | np.ndarray) -> float:
    """Mean |(M†M)_ij| over off-diagonal entries (0 for a perfect unitary)."""
    return unitarity_report(matrix).off_diagonal_mean


def is_unitary(matrix: TransferMatrix | np.ndarray, tol: float = UNITARY_ACCEPT_TOL) -> bool:
    rep = unitarity_report(matrix)
    return rep.off_diagonal_mean <= tol and rep.diagonal_max_deviation <= tol


def scattering_submatrix(
    matrix: TransferMatrix | np.ndarray,
    input_modes,
    output_modes,
) -> np.ndarray:
    """n x n submatrix whose permanent gives the transition amplitude.

    Parameters
    ----------
    input_modes : sequence of int
        Distinct occupied input modes (one photon each).
    output_modes : sequence of int
        Output modes with repetition encoding collisions.

    Returns
    -------
    np.ndarray
        M with M[k, j] = U[output_modes[k], input_modes[j]], both lists taken
        in ascending order.  Row count equals the total output occupation.
    """
    mat = matrix.mat if isinstance(matrix, TransferMatrix) else np.asarray(matrix)
    m = mat.shape[0]
    cols = sorted(int(c) for c in input_modes)
    rows = sorted(int(r) for r in output_modes)
    if len(set(cols)) != len(cols):
        raise ValueError(f"input modes must be distinct, got {cols}")
    if len(rows) != len(cols):
        raise ValueError(
            f"photon-count mismatch: {len(cols)} input photons vs {len(rows)} output photons"
        )
    for idx in (*cols, *rows):
        if not 0 <= idx < m:
            raise ValueError(f"mode index {idx} out of range for m={m}")
    return mat[np.ix_(rows, cols)]


def save_matrix(path, matrix: TransferMatrix) -> None:
    """Write matrix JSON: {"m", "re", "im"} plus a provenance "meta" block."""
    mat = matrix.mat
    doc = {
        "m": matrix.m,
        "re": mat.real.tolist(),
        "im": mat.imag.tolist(),
        "meta": {
            "version": __version__,
            "fingerprint": matrix.fingerprint,
            "unitary": matrix.unitary,
            "phase_gauge": matrix.phase_gauge,
            "normalization": matrix.normalization,
        },
    }
    Path(path).write_text(json.dumps(doc))


def load_matrix(path) -> TransferMatrix:
    """Read matrix JSON, validating shape; the unitary flag is re-derived."""
    doc = json.loads(Path(path).read_text())
    try:
        m = int(doc["m"])
        re = np.asarray(doc["re"], dtype=np.float64)
        im = np.asarray(doc["im"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix file {path}: {exc}") from None
    if re.shape != (m, m) or im.shape != (m, m):
        raise ValueError(
            f"matrix file {path}: declared m={m} but arrays have shapes "
            f"{re.shape} and {im.shape}"
        )
    meta = doc.get("meta", {})
    mat = re + 1j * im
    return TransferMatrix(
        mat,
        unitary=is_unitary(mat),
        phase_gauge=meta.get("phase_gauge"),
        normalization=meta.get("normalization"),
    )
