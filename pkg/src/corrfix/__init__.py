"""Repair indefinite correlation-like matrices into valid correlation matrices.

The core pipeline eigendecomposes a symmetric matrix, raises every
eigenvalue below a small positive floor up to that floor, multiplies the
decomposition back out, and renormalizes to unit diagonal. Around it sit
validation reports, sample-correlation computation from time-series panels
(including deliberately inconsistent per-pair windows, the classic source
of indefiniteness), matrix norms for quantifying the repair distance, and
an alternating-projections baseline for comparison.
"""

from .ingest import (
    DegenerateSeriesError,
    MissingPolicy,
    PairOverride,
    TimeSeriesPanel,
    parse_panel,
    pearson,
    read_matrix,
    sample_correlation,
    write_matrix,
)
from .linalg import (
    ConvergenceError,
    NormReport,
    SpectralDecomposition,
    SymmetricMatrix,
    diff_norms,
    hadamard_square,
    norms_of,
    reconstruct,
    sym_eigen,
)
from .repair import (
    CheckReport,
    CorrelationMatrix,
    RepairResult,
    apd_nearest,
    check_correlation,
    clip_eigenvalues,
    diagonal_consistency,
    normalize_to_correlation,
    shrink_repair,
)

__version__ = "0.1.0"

__all__ = [
    "CheckReport",
    "ConvergenceError",
    "CorrelationMatrix",
    "DegenerateSeriesError",
    "MissingPolicy",
    "NormReport",
    "PairOverride",
    "RepairResult",
    "SpectralDecomposition",
    "SymmetricMatrix",
    "TimeSeriesPanel",
    "apd_nearest",
    "check_correlation",
    "clip_eigenvalues",
    "diagonal_consistency",
    "diff_norms",
    "hadamard_square",
    "normalize_to_correlation",
    "norms_of",
    "parse_panel",
    "pearson",
    "read_matrix",
    "reconstruct",
    "sample_correlation",
    "shrink_repair",
    "sym_eigen",
    "write_matrix",
]
