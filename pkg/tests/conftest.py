"""Shared fixtures: the five-instrument demo panel, its distorted and
repaired correlation matrices (3-decimal reference values), and random
matrix generators used by the property suites.

Oracles in these tests deliberately go through numpy's LAPACK-backed
routines (eigvalsh, corrcoef) so that the library's own eigensolver and
correlation code are checked against an independent implementation.
"""

import numpy as np
import pytest

from corrfix import SymmetricMatrix

# Close prices of four Euronext Amsterdam stocks plus the EUR/USD rate,
# six consecutive business days (late July / early August 2013).
PRICES = {
    "Galapagos": (16.08, 16.15, 16.13, 16.25, 16.25, 16.23),
    "Heineken": (50.69, 50.88, 51.66, 52.8, 53.8, 53.9),
    "TomTom": (4.286, 4.3, 4.363, 4.38, 4.497, 4.525),
    "Wolters Kluwer": (18.09, 18.005, 18.095, 18.145, 18.5, 18.515),
    "Euro/US dollar": (1.3279, 1.3263, 1.3266, 1.3300, 1.3212, 1.328),
}

DATES = ("2013-07-26", "2013-07-29", "2013-07-30", "2013-07-31", "2013-08-01", "2013-08-02")

# Correlation matrix of the panel where the (Wolters Kluwer, EUR/USD) pair
# was computed over the first five days only: indefinite, min eig -0.089.
DISTORTED = np.array(
    [
        [1.000, 0.896, 0.785, 0.684, -0.179],
        [0.896, 1.000, 0.970, 0.914, -0.275],
        [0.785, 0.970, 1.000, 0.961, -0.359],
        [0.684, 0.914, 0.961, 1.000, -0.767],
        [-0.179, -0.275, -0.359, -0.767, 1.000],
    ]
)

# Clip repair of DISTORTED at epsilon = 0.001, rounded to 3 decimals.
CORRECTED = np.array(
    [
        [1.000, 0.888, 0.779, 0.672, -0.175],
        [0.888, 1.000, 0.970, 0.860, -0.284],
        [0.779, 0.970, 1.000, 0.909, -0.366],
        [0.672, 0.860, 0.909, 1.000, -0.716],
        [-0.175, -0.284, -0.366, -0.716, 1.000],
    ]
)


def panel_csv_text() -> str:
    lines = ["date," + ",".join(PRICES)]
    for d, date in enumerate(DATES):
        cells = [date] + [repr(PRICES[label][d]) for label in PRICES]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def matrix_csv_text(a: np.ndarray, precision: int = 3) -> str:
    rows = [",".join(f"{v:.{precision}f}" for v in row) for row in a]
    return "\n".join(rows) + "\n"


@pytest.fixture
def panel_csv() -> str:
    return panel_csv_text()


@pytest.fixture
def panel_path(tmp_path):
    path = tmp_path / "panel.csv"
    path.write_text(panel_csv_text())
    return str(path)


@pytest.fixture
def distorted() -> SymmetricMatrix:
    return SymmetricMatrix(DISTORTED)


@pytest.fixture
def distorted_path(tmp_path):
    path = tmp_path / "distorted.csv"
    path.write_text(matrix_csv_text(DISTORTED))
    return str(path)


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_correlation(rng: np.random.Generator, n: int, lo=0.3, hi=2.0) -> np.ndarray:
    """Random valid correlation matrix with eigenvalues bounded away from 0
    (before normalization), built with plain numpy."""
    q = random_orthogonal(rng, n)
    cov = (q * rng.uniform(lo, hi, n)) @ q.T
    cov = (cov + cov.T) / 2.0
    s = np.sqrt(np.diag(cov))
    c = cov / np.outer(s, s)
    np.fill_diagonal(c, 1.0)
    return c


def random_near_singular_correlation(rng: np.random.Generator, n: int) -> np.ndarray:
    """Valid correlation matrix whose smallest eigenvalue sits near zero."""
    q = random_orthogonal(rng, n)
    values = np.sort(rng.uniform(0.02, 2.0, n))[::-1]
    values[-1] = rng.uniform(0.01, 0.08)
    cov = (q * values) @ q.T
    cov = (cov + cov.T) / 2.0
    s = np.sqrt(np.diag(cov))
    c = cov / np.outer(s, s)
    np.fill_diagonal(c, 1.0)
    return c


def random_indefinite(
    rng: np.random.Generator,
    n: int,
    noise: float = 0.15,
    min_eig_floor: float = -np.inf,
) -> np.ndarray:
    """Unit-diagonal symmetric matrix with at least one negative eigenvalue,
    produced by perturbing a near-singular correlation matrix. The noise is
    doubled every 50 rejections so generation always terminates; an optional
    floor keeps the indefiniteness mild."""
    base = random_near_singular_correlation(rng, n)
    for attempt in range(400):
        amplitude = noise * 2.0 ** (attempt // 50)
        raw = rng.standard_normal((n, n))
        candidate = base + amplitude * (raw + raw.T) / 2.0
        np.fill_diagonal(candidate, 1.0)
        smallest = np.linalg.eigvalsh(candidate)[0]
        if min_eig_floor < smallest < 0.0:
            return candidate
    raise AssertionError(f"could not generate an indefinite {n}x{n} matrix")


def random_mildly_indefinite(rng: np.random.Generator, n: int) -> np.ndarray:
    """Indefinite matrix whose smallest eigenvalue is small in magnitude,
    the regime the clipping repair is meant for."""
    return random_indefinite(rng, n, noise=0.08, min_eig_floor=-0.2)


def random_symmetric(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((n, n)) * scale
    return (a + a.T) / 2.0
