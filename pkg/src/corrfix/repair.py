"""Correlation-matrix repair by eigenvalue clipping, plus validation tools.

The shrinking repair replaces every eigenvalue below a small positive floor
epsilon by epsilon (keeping the eigenvectors), then renormalizes the result
back to unit diagonal. An alternating-projections baseline (Dykstra) is
included purely so the clipping repair's distance can be compared against
the Frobenius-nearest correlation matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    ConvergenceError,
    NormReport,
    SpectralDecomposition,
    SymmetricMatrix,
    diff_norms,
    hadamard_square,
    reconstruct,
    sym_eigen,
)

DEFAULT_EPSILON = 1e-8

# Validation tolerances: unit diagonal, PSD floor, off-diagonal range slack.
DIAG_TOL = 1e-8
PSD_TOL = 1e-10
OFFDIAG_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """A symmetric matrix with exactly unit diagonal and entries in [-1, 1].

    Positive semidefiniteness is certified by the producing operation
    (``shrink_repair`` and ``apd_nearest`` guarantee it by construction);
    ``check_correlation`` re-verifies it for arbitrary matrices. The cheap
    invariants (diagonal bitwise 1.0, off-diagonals within OFFDIAG_TOL of
    [-1, 1]) are enforced here.
    """

    inner: SymmetricMatrix

    def __post_init__(self):
        e = self.inner.entries
        if not (np.diag(e) == 1.0).all():
            raise ValueError("correlation matrix diagonal must be exactly 1.0")
        off = e.copy()
        np.fill_diagonal(off, 0.0)
        largest = float(np.abs(off).max())
        if largest > 1.0 + OFFDIAG_TOL:
            raise ValueError(
                f"off-diagonal entry {largest:.17g} lies outside [-1, 1]"
            )

    @property
    def entries(self) -> np.ndarray:
        return self.inner.entries

    @property
    def n(self) -> int:
        return self.inner.n


@dataclass(frozen=True, eq=False)
class RepairResult:
    """Repaired matrix plus the bookkeeping of how it was produced.

    ``shifts`` are the per-eigenvalue corrections (clipped minus input,
    descending order). For the projection baseline they are plain
    sorted-spectrum differences, reported for comparison only, and
    ``epsilon`` records the convergence tolerance instead of a floor.
    """

    repaired: CorrelationMatrix
    epsilon: float
    shifts: np.ndarray
    clipped_count: int
    input_eigenvalues: np.ndarray
    distance: NormReport
    method: str


@dataclass(frozen=True)
class CheckReport:
    """Field-by-field verdict on whether a matrix is a correlation matrix."""

    is_symmetric: bool
    max_asymmetry: float
    unit_diagonal: bool
    max_diagonal_deviation: float
    min_eigenvalue: float
    is_psd: bool
    is_correlation: bool
    offdiag_in_range: bool


def clip_eigenvalues(
    d: SpectralDecomposition, epsilon: float
) -> tuple[SpectralDecomposition, np.ndarray]:
    """Raise every eigenvalue below epsilon up to epsilon.

    Returns the clipped decomposition (same eigenvectors) and the
    non-negative shifts applied. A shift is strictly positive exactly when
    the input eigenvalue was below epsilon, so the clipped spectrum is
    bounded below by epsilon and the result is positive definite.
    """
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    clipped = np.maximum(d.values, epsilon)
    return SpectralDecomposition(d.vectors, clipped), clipped - d.values


def normalize_to_correlation(covariance: SymmetricMatrix) -> CorrelationMatrix:
    """Rescale a covariance matrix entrywise to unit diagonal.

    Entry (i, j) becomes a_ij / sqrt(a_ii * a_jj); the diagonal is written
    as exactly 1.0 rather than recomputed through the division.
    """
    d = np.diag(covariance.entries)
    bad = np.nonzero(d <= 0.0)[0]
    if bad.size:
        i = int(bad[0])
        raise ValueError(
            f"diagonal entry {i} is {d[i]:g}; normalization needs a strictly "
            "positive diagonal (input is not a valid covariance matrix)"
        )
    scale = np.sqrt(d)
    out = covariance.entries / np.outer(scale, scale)
    np.fill_diagonal(out, 1.0)
    return CorrelationMatrix(SymmetricMatrix(out))


def shrink_repair(
    a: SymmetricMatrix, epsilon: float = DEFAULT_EPSILON
) -> RepairResult:
    """Repair an indefinite symmetric matrix into a correlation matrix.

    Pipeline: eigendecompose, clip eigenvalues at epsilon, multiply back
    out, renormalize to unit diagonal. Inputs whose eigenvalues already
    clear epsilon pass through up to rounding.
    """
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    decomposition = sym_eigen(a)
    clipped, shifts = clip_eigenvalues(decomposition, epsilon)
    covariance = reconstruct(clipped)
    diag = np.diag(covariance.entries)
    # Rows of an orthogonal matrix have unit norm, so clipping cannot push
    # any diagonal entry below epsilon (up to rounding).
    assert (diag >= epsilon * (1.0 - 1e-9)).all(), "clipped matrix lost its diagonal"
    repaired = normalize_to_correlation(covariance)
    return RepairResult(
        repaired=repaired,
        epsilon=float(epsilon),
        shifts=shifts,
        clipped_count=int((shifts > 0.0).sum()),
        input_eigenvalues=decomposition.values,
        distance=diff_norms(a, repaired.inner),
        method="clip",
    )


def check_correlation(
    a: SymmetricMatrix, tol_diag: float = DIAG_TOL, tol_psd: float = PSD_TOL
) -> CheckReport:
    """Check the correlation-matrix conditions one by one.

    A correlation matrix is exactly a positive semidefinite matrix with
    units on the main diagonal; the report also tracks the off-diagonal
    range so callers can see which condition failed.
    """
    e = a.entries
    max_asymmetry = float(np.abs(e - e.T).max())
    is_symmetric = max_asymmetry == 0.0
    max_diagonal_deviation = float(np.abs(np.diag(e) - 1.0).max())
    unit_diagonal = max_diagonal_deviation <= tol_diag
    min_eigenvalue = float(sym_eigen(a).values[-1])
    is_psd = min_eigenvalue >= -tol_psd
    off = e.copy()
    np.fill_diagonal(off, 0.0)
    offdiag_in_range = float(np.abs(off).max()) <= 1.0 + OFFDIAG_TOL
    return CheckReport(
        is_symmetric=is_symmetric,
        max_asymmetry=max_asymmetry,
        unit_diagonal=unit_diagonal,
        max_diagonal_deviation=max_diagonal_deviation,
        min_eigenvalue=min_eigenvalue,
        is_psd=is_psd,
        is_correlation=is_symmetric and unit_diagonal and is_psd and offdiag_in_range,
        offdiag_in_range=offdiag_in_range,
    )


def diagonal_consistency(
    d: SpectralDecomposition, target_diagonal
) -> float:
    """Max-norm residual of the diagonal equation B**2 . lambda = target.

    The Hadamard square of the eigenvector matrix applied to the eigenvalues
    reproduces the matrix diagonal exactly, so for any unit-diagonal matrix
    the residual against the all-ones target vanishes; after clipping it
    measures how far the unnormalized repaired matrix drifted from unit
    diagonal.
    """
    target = np.asarray(target_diagonal, dtype=float)
    if target.shape != (d.n,):
        raise ValueError(
            f"target diagonal has length {target.shape}, expected ({d.n},)"
        )
    residual = hadamard_square(d.vectors) @ d.values - target
    return float(np.abs(residual).max())


def apd_nearest(
    a: SymmetricMatrix, max_iter: int = 1000, tol: float = 1e-8
) -> RepairResult:
    """Frobenius-nearest correlation matrix by Dykstra alternating projections.

    Alternates projection onto the PSD cone (eigenvalue clipping at zero,
    with Dykstra's correction) and onto the unit-diagonal affine set
    (overwrite the diagonal with ones). Stops once the Frobenius change
    between successive iterates is at most ``tol``; raises ConvergenceError
    carrying the last iterate and residual otherwise.

    Baseline only: uses the LAPACK eigensolver internally, so its distances
    are an independent yardstick for the clipping repair.
    """
    if max_iter < 1:
        raise ValueError(f"max_iter must be at least 1, got {max_iter}")
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    y = a.entries.copy()
    correction = np.zeros_like(y)
    change = np.inf
    for _ in range(max_iter):
        r = y - correction
        w, v = np.linalg.eigh(r)
        x = (v * np.maximum(w, 0.0)) @ v.T
        x = (x + x.T) / 2.0
        correction = x - r
        y_next = x.copy()
        np.fill_diagonal(y_next, 1.0)
        change = float(np.sqrt(((y_next - y) ** 2).sum()))
        y = y_next
        if change <= tol:
            break
    else:
        raise ConvergenceError(
            f"alternating projections still moving after {max_iter} iterations: "
            f"Frobenius change {change:.3e} > {tol:.3e}",
            residual=change,
            last=y,
        )
    # Rounding guard: the exact projection satisfies |y_ij| <= 1, but the
    # truncated iteration can overshoot by O(tol).
    np.clip(y, -1.0, 1.0, out=y)
    np.fill_diagonal(y, 1.0)
    repaired = CorrelationMatrix(SymmetricMatrix(y))
    input_spectrum = np.linalg.eigvalsh(a.entries)[::-1]
    output_spectrum = np.linalg.eigvalsh(repaired.entries)[::-1]
    shifts = output_spectrum - input_spectrum
    return RepairResult(
        repaired=repaired,
        epsilon=float(tol),
        shifts=shifts,
        clipped_count=int((shifts > 0.0).sum()),
        input_eigenvalues=input_spectrum,
        distance=diff_norms(a, repaired.inner),
        method="apd",
    )
