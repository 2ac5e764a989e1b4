"""Dense symmetric eigendecomposition, matrix norms, and elementwise helpers.

Matrices are small and dense (desk scale, n up to a few hundred), so the
eigensolver is a plain cyclic Jacobi iteration: it is simple, quadratically
convergent, and delivers a genuinely orthogonal eigenvector matrix, which
the repair pipeline relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Relative asymmetry tolerated on ingestion; anything larger is an error,
# anything smaller is silently symmetrized as (A + A.T) / 2.
ASYMMETRY_RTOL = 1e-9

# Jacobi stops once the off-diagonal Frobenius norm falls below
# JACOBI_RTOL * ||A||_F, well inside the 1e-12 * n * ||A||_F round-trip budget.
JACOBI_RTOL = 1e-14
JACOBI_MAX_SWEEPS = 100

# Components smaller than this are ignored when fixing eigenvector signs.
SIGN_EPS = 1e-12


class ConvergenceError(RuntimeError):
    """An iteration failed to reach its tolerance within the allowed steps.

    Attributes:
        residual: the residual at the point the iteration gave up.
        last: the last iterate, when the algorithm has a meaningful one.
    """

    def __init__(self, message: str, residual: float, last=None):
        super().__init__(message)
        self.residual = residual
        self.last = last


@dataclass(frozen=True, eq=False)
class SymmetricMatrix:
    """Dense real symmetric matrix, stored exactly symmetrized.

    Rejects non-square or non-finite input, and asymmetry beyond
    ASYMMETRY_RTOL * max|a_ij| (real files round, so a small slack is
    tolerated and removed by storing (A + A.T) / 2, which is exact in
    floating point).
    """

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] < 1:
            raise ValueError("matrix must be at least 1x1")
        if not np.isfinite(a).all():
            raise ValueError("matrix entries must be finite")
        asymmetry = float(np.abs(a - a.T).max())
        if asymmetry > ASYMMETRY_RTOL * float(np.abs(a).max()):
            raise ValueError(
                f"matrix is not symmetric: max |a_ij - a_ji| = {asymmetry:.3e} "
                f"exceeds {ASYMMETRY_RTOL:g} * max|a_ij|"
            )
        a = (a + a.T) / 2.0
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvector matrix (columns) paired with the matching eigenvalues.

    ``sym_eigen`` guarantees orthogonal columns, values sorted descending,
    and a deterministic sign convention (the first component of each column
    with absolute value above SIGN_EPS is positive). The constructor itself
    only checks shapes and finiteness, so that hand-built decompositions can
    be fed to ``reconstruct`` directly.
    """

    vectors: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=float)
        w = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"eigenvector matrix must be square, got shape {v.shape}")
        if w.shape != (v.shape[0],):
            raise ValueError(
                f"expected {v.shape[0]} eigenvalues, got shape {w.shape}"
            )
        if not (np.isfinite(v).all() and np.isfinite(w).all()):
            raise ValueError("decomposition entries must be finite")
        v.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "values", w)

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class NormReport:
    """Frobenius norm, max norm, and the size-scaled max norm n * max.

    The max norm alone is not submultiplicative; scaling by the matrix
    size restores submultiplicativity, which is why both are reported.
    """

    frobenius: float
    max: float
    scaled_max: float


def _off_norm(m: np.ndarray) -> float:
    off = m.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.sqrt((off * off).sum()))


def _fix_signs(vectors: np.ndarray) -> None:
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        significant = np.nonzero(np.abs(col) > SIGN_EPS)[0]
        if significant.size and col[significant[0]] < 0.0:
            vectors[:, j] = -col


def _round_robin_rounds(n: int) -> list[np.ndarray]:
    """Partition all index pairs into rounds of pairwise-disjoint pairs.

    Circle-method tournament schedule: one sweep visits every off-diagonal
    pair exactly once, and the pairs within a round touch disjoint planes,
    so their rotations commute and can be applied together.
    """
    players = list(range(n)) if n % 2 == 0 else list(range(n)) + [n]
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = [
            (min(players[i], players[m - 1 - i]), max(players[i], players[m - 1 - i]))
            for i in range(m // 2)
        ]
        pairs = [pair for pair in pairs if pair[1] < n]  # drop the padding index
        if pairs:
            rounds.append(np.array(pairs, dtype=int))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _rotate_round(m: np.ndarray, vectors: np.ndarray, pairs: np.ndarray) -> None:
    """Apply one round of disjoint Jacobi rotations in place."""
    p = pairs[:, 0]
    q = pairs[:, 1]
    apq = m[p, q]
    active = apq != 0.0
    if not active.any():
        return
    p, q, apq = p[active], q[active], apq[active]
    # Smaller-root rotation angle, for stability; the denominator is >= 1.
    with np.errstate(over="ignore"):
        tau = (m[q, q] - m[p, p]) / (2.0 * apq)
        sign = np.where(tau >= 0.0, 1.0, -1.0)
        t = sign / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    mp = m[:, p].copy()
    mq = m[:, q].copy()
    m[:, p] = c * mp - s * mq
    m[:, q] = s * mp + c * mq
    mp = m[p, :].copy()
    mq = m[q, :].copy()
    m[p, :] = c[:, None] * mp - s[:, None] * mq
    m[q, :] = s[:, None] * mp + c[:, None] * mq
    m[p, q] = 0.0
    m[q, p] = 0.0
    vp = vectors[:, p].copy()
    vq = vectors[:, q].copy()
    vectors[:, p] = c * vp - s * vq
    vectors[:, q] = s * vp + c * vq


def sym_eigen(a: SymmetricMatrix) -> SpectralDecomposition:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Sweeps run until the off-diagonal Frobenius norm drops below
    JACOBI_RTOL * ||A||_F, or JACOBI_MAX_SWEEPS is hit (ConvergenceError,
    carrying the residual). Eigenvalues come back sorted descending; exact
    ties are broken by putting the lexicographically larger sign-fixed
    eigenvector first, so output is bitwise reproducible.
    """
    n = a.n
    m = a.entries.copy()
    vectors = np.eye(n)
    threshold = JACOBI_RTOL * float(np.sqrt((m * m).sum()))
    rounds = _round_robin_rounds(n)
    residual = _off_norm(m)
    sweeps = 0
    while residual > threshold:
        if sweeps >= JACOBI_MAX_SWEEPS:
            raise ConvergenceError(
                f"Jacobi iteration still above tolerance after {sweeps} sweeps: "
                f"off-diagonal norm {residual:.3e} > {threshold:.3e}",
                residual=residual,
            )
        for pairs in rounds:
            _rotate_round(m, vectors, pairs)
        sweeps += 1
        residual = _off_norm(m)
    values = np.diag(m).copy()
    _fix_signs(vectors)
    order = sorted(range(n), key=lambda j: (-values[j], tuple(-vectors[:, j])))
    return SpectralDecomposition(vectors=vectors[:, order], values=values[order])


def reconstruct(d: SpectralDecomposition) -> SymmetricMatrix:
    """Multiply the decomposition back out, symmetrizing away rounding."""
    m = (d.vectors * d.values) @ d.vectors.T
    return SymmetricMatrix((m + m.T) / 2.0)


def norms_of(a: SymmetricMatrix) -> NormReport:
    """Frobenius, max, and size-scaled max norms of a matrix."""
    e = a.entries
    largest = float(np.abs(e).max())
    return NormReport(
        frobenius=float(np.sqrt((e * e).sum())),
        max=largest,
        scaled_max=a.n * largest,
    )


def diff_norms(a: SymmetricMatrix, b: SymmetricMatrix) -> NormReport:
    """Norms of A - B; the distances the repair pipeline reports."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    return norms_of(SymmetricMatrix(a.entries - b.entries))


def hadamard_square(m: np.ndarray) -> np.ndarray:
    """Entrywise square. For an orthogonal matrix, rows and columns sum to 1."""
    m = np.asarray(m, dtype=float)
    if not np.isfinite(m).all():
        raise ValueError("matrix entries must be finite")
    return m * m
