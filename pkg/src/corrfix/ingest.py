"""Time-series panels, sample correlation matrices, and matrix CSV files.

Correlations are computed on the raw observation levels over per-pair
windows. Mixing windows (missing-data policies, per-pair overrides) is the
classic way an empirical "correlation" matrix ends up indefinite, which is
exactly the failure mode the repair module exists for.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass

import numpy as np

from .linalg import SymmetricMatrix

# With 2 observations every correlation is exactly +-1; 3 is the smallest
# window that carries information.
MIN_WINDOW = 3


class DegenerateSeriesError(ValueError):
    """A series is constant over the requested window."""


class MissingPolicy(enum.Enum):
    """How missing observations are handled when correlating a panel.

    fail: any missing cell anywhere is an error.
    drop: restrict every pair to the dates where all instruments are present.
    pairwise: each pair uses the dates where both of its series are present
        (a well-known source of indefiniteness).
    """

    FAIL = "fail"
    DROP_INCOMPLETE_DATES = "drop"
    PAIRWISE_COMPLETE = "pairwise"


@dataclass(frozen=True, eq=False)
class TimeSeriesPanel:
    """Labeled instruments x dated observations; NaN marks a missing cell.

    Dates are opaque ordered strings: nothing here does calendar arithmetic,
    only the given order matters.
    """

    instruments: tuple[str, ...]
    dates: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        instruments = tuple(self.instruments)
        dates = tuple(self.dates)
        if len(instruments) < 1:
            raise ValueError("panel needs at least one instrument")
        if len(dates) < 2:
            raise ValueError("panel needs at least two dates")
        if any(not label for label in instruments):
            raise ValueError("instrument labels must be non-empty")
        if len(set(instruments)) != len(instruments):
            raise ValueError("duplicate instrument label")
        if len(set(dates)) != len(dates):
            raise ValueError("duplicate date")
        values = np.array(self.values, dtype=float)
        if values.shape != (len(instruments), len(dates)):
            raise ValueError(
                f"values shape {values.shape} does not match "
                f"{len(instruments)} instruments x {len(dates)} dates"
            )
        if np.isinf(values).any():
            raise ValueError("observations must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "instruments", instruments)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)

    @property
    def n_instruments(self) -> int:
        return len(self.instruments)

    @property
    def n_dates(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class PairOverride:
    """Restrict one pair's correlation to an inclusive window of date indices.

    Indices are 0-based positions into the panel's date list; bounds against
    a concrete panel are checked when the override is applied.
    """

    instrument_a: str
    instrument_b: str
    start: int
    end: int

    def __post_init__(self):
        if self.instrument_a == self.instrument_b:
            raise ValueError("override must name two distinct instruments")
        if self.start < 0 or self.end < self.start:
            raise ValueError(
                f"override window {self.start}..{self.end} is empty or negative"
            )
        if self.end - self.start + 1 < MIN_WINDOW:
            raise ValueError(
                f"override window needs at least {MIN_WINDOW} dates, "
                f"got {self.end - self.start + 1}"
            )


def parse_panel(text: str) -> TimeSeriesPanel:
    """Parse a panel CSV: date column first, one column per instrument.

    Empty cells become missing observations. Errors name the offending
    row and column.
    """
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if not rows:
        raise ValueError("empty panel document")
    header = [cell.strip() for cell in rows[0]]
    if len(header) < 2:
        raise ValueError("panel header needs a date column and at least one instrument")
    labels = header[1:]
    if any(not label for label in labels):
        raise ValueError("instrument labels must be non-empty")
    if len(set(labels)) != len(labels):
        raise ValueError("duplicate instrument label in header")
    data_rows = rows[1:]
    if len(data_rows) < 2:
        raise ValueError(f"panel needs at least 2 data rows, got {len(data_rows)}")
    dates = []
    grid = []
    for r, row in enumerate(data_rows, start=2):
        cells = [cell.strip() for cell in row]
        if len(cells) != len(header):
            raise ValueError(
                f"row {r} has {len(cells)} cells, expected {len(header)}"
            )
        dates.append(cells[0])
        parsed = []
        for c, cell in enumerate(cells[1:], start=1):
            if cell == "":
                parsed.append(np.nan)
                continue
            try:
                parsed.append(float(cell))
            except ValueError:
                raise ValueError(
                    f"unparseable number {cell!r} at row {r}, "
                    f"column {labels[c - 1]!r}"
                ) from None
        grid.append(parsed)
    if len(set(dates)) != len(dates):
        raise ValueError("duplicate date in panel")
    values = np.array(grid, dtype=float).T
    return TimeSeriesPanel(instruments=tuple(labels), dates=tuple(dates), values=values)


def pearson(x, y) -> float:
    """Sample Pearson correlation of two equal-length series.

    Clamped to [-1, 1] to absorb rounding. Constant series (zero variance
    up to rounding noise) raise DegenerateSeriesError.
    """
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    if xv.ndim != 1 or yv.ndim != 1 or xv.shape != yv.shape:
        raise ValueError(f"length mismatch: {xv.shape} vs {yv.shape}")
    if xv.size < MIN_WINDOW:
        raise ValueError(
            f"need at least {MIN_WINDOW} observations, got {xv.size}"
        )
    if not (np.isfinite(xv).all() and np.isfinite(yv).all()):
        raise ValueError("observations must be finite")
    dx = xv - xv.mean()
    dy = yv - yv.mean()
    sx = float((dx * dx).sum())
    sy = float((dy * dy).sum())
    for label, spread, series in (("first", sx, xv), ("second", sy, yv)):
        scale = max(1.0, float(np.abs(series).max()))
        if np.sqrt(spread / series.size) <= 1e-12 * scale:
            raise DegenerateSeriesError(
                f"{label} series is constant; correlation is undefined"
            )
    r = float((dx * dy).sum() / np.sqrt(sx * sy))
    return min(1.0, max(-1.0, r))


def sample_correlation(
    panel: TimeSeriesPanel,
    policy: MissingPolicy = MissingPolicy.FAIL,
    overrides: tuple[PairOverride, ...] | list[PairOverride] = (),
) -> SymmetricMatrix:
    """Pearson correlation matrix of a panel, entry by entry.

    Each pair is correlated over its own observation window: an override
    window when one names the pair, otherwise the dates the policy allows.
    With overrides or pairwise windows the result need not be positive
    semidefinite; that mismatch is the distortion this library repairs.
    """
    labels = panel.instruments
    index = {label: i for i, label in enumerate(labels)}
    values = panel.values
    present = np.isfinite(values)
    n = panel.n_instruments

    window_by_pair: dict[frozenset, np.ndarray] = {}
    for override in overrides:
        for label in (override.instrument_a, override.instrument_b):
            if label not in index:
                raise ValueError(f"override names unknown instrument {label!r}")
        if override.end >= panel.n_dates:
            raise ValueError(
                f"override window {override.start}..{override.end} exceeds "
                f"the panel's {panel.n_dates} dates"
            )
        key = frozenset((index[override.instrument_a], index[override.instrument_b]))
        if key in window_by_pair:
            raise ValueError(
                f"duplicate override for pair ({override.instrument_a!r}, "
                f"{override.instrument_b!r})"
            )
        window_by_pair[key] = np.arange(override.start, override.end + 1)

    if policy is MissingPolicy.FAIL and not present.all():
        i, d = np.argwhere(~present)[0]
        raise ValueError(
            f"missing observation for {labels[i]!r} on {panel.dates[d]!r} "
            "(policy is fail)"
        )
    if policy is MissingPolicy.DROP_INCOMPLETE_DATES:
        base_window = np.nonzero(present.all(axis=0))[0]
    else:
        base_window = np.arange(panel.n_dates)

    out = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            key = frozenset((i, j))
            if key in window_by_pair:
                w = window_by_pair[key]
                w = w[present[i, w] & present[j, w]]
            elif policy is MissingPolicy.PAIRWISE_COMPLETE:
                w = np.nonzero(present[i] & present[j])[0]
            else:
                w = base_window
            if w.size < MIN_WINDOW:
                raise ValueError(
                    f"instruments {labels[i]!r} and {labels[j]!r} share only "
                    f"{w.size} observations; need at least {MIN_WINDOW}"
                )
            try:
                r = pearson(values[i, w], values[j, w])
            except DegenerateSeriesError as exc:
                raise DegenerateSeriesError(
                    f"cannot correlate {labels[i]!r} with {labels[j]!r}: {exc}"
                ) from None
            out[i, j] = out[j, i] = r
    return SymmetricMatrix(out)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_matrix(text: str) -> SymmetricMatrix:
    """Read a square matrix CSV, with or without a symmetric label header.

    A non-numeric (or empty) first cell flags a header row plus a label
    column; otherwise the document is a plain numeric grid. Asymmetry within
    rounding tolerance is symmetrized, anything larger is an error.
    """
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if not rows:
        raise ValueError("empty matrix document")
    has_header = not _is_number(rows[0][0].strip())
    if has_header:
        n_expected = len(rows[0]) - 1
        data_rows = [row[1:] for row in rows[1:]]
    else:
        n_expected = len(rows[0])
        data_rows = rows
    if len(data_rows) != n_expected:
        raise ValueError(
            f"matrix is not square: {len(data_rows)} rows of {n_expected} columns"
        )
    grid = []
    for r, row in enumerate(data_rows, start=1):
        cells = [cell.strip() for cell in row]
        if len(cells) != n_expected:
            raise ValueError(
                f"matrix is not square: row {r} has {len(cells)} cells, "
                f"expected {n_expected}"
            )
        parsed = []
        for c, cell in enumerate(cells, start=1):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise ValueError(
                    f"unparseable number {cell!r} at row {r}, column {c}"
                ) from None
        grid.append(parsed)
    return SymmetricMatrix(np.array(grid, dtype=float))


def write_matrix(a: SymmetricMatrix, precision: int = 6, labels=None) -> str:
    """Render a matrix as CSV with fixed-precision decimals.

    ``labels``, when given, adds a symmetric header (empty corner cell,
    labels across the top and down the first column) that ``read_matrix``
    detects and strips.
    """
    if not 1 <= precision <= 17:
        raise ValueError(f"precision must be in [1, 17], got {precision}")
    if labels is not None and len(labels) != a.n:
        raise ValueError(
            f"got {len(labels)} labels for a {a.n}x{a.n} matrix"
        )
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    if labels is not None:
        writer.writerow([""] + list(labels))
    for i, row in enumerate(a.entries):
        cells = [f"{value + 0.0:.{precision}f}" for value in row]
        if labels is not None:
            cells.insert(0, labels[i])
        writer.writerow(cells)
    return out.getvalue()
