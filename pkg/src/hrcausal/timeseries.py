"""Fixed-rate multivariate time-series batches.

A :class:`TimeSeriesBatch` is the unit handed to causal discovery: named
variables sampled on one clock, with missing values stored as NaN (all
non-missing values must be finite, so NaN is unambiguous). Operations are
pure; batches are immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DegenerateDataError, ParseError

_SPACING_TOL = 1e-6


@dataclass(frozen=True)
class TimeSeriesBatch:
    """Multivariate series sampled at a fixed rate.

    values has shape (n_rows, n_variables); NaN marks a missing value.
    Timestamps are seconds, strictly increasing with spacing 1/rate_hz.
    """

    variables: tuple[str, ...]
    rate_hz: float
    start_time: float
    timestamps: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        ts = np.ascontiguousarray(np.asarray(self.timestamps, dtype=float))
        vals = np.ascontiguousarray(np.asarray(self.values, dtype=float))
        if vals.ndim == 1:
            vals = vals.reshape(-1, 1)
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)

        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        if not self.rate_hz > 0:
            raise ValueError(f"rate_hz must be > 0, got {self.rate_hz}")
        if vals.shape != (ts.shape[0], len(self.variables)):
            raise ValueError(
                f"values shape {vals.shape} does not match "
                f"{ts.shape[0]} rows x {len(self.variables)} variables"
            )
        if ts.size:
            if abs(ts[0] - self.start_time) > _SPACING_TOL:
                raise ValueError("start_time does not match first timestamp")
            dt = np.diff(ts)
            if dt.size and (np.abs(dt - 1.0 / self.rate_hz) > _SPACING_TOL).any():
                raise ValueError("timestamps not spaced by 1/rate_hz")
        finite_or_nan = np.isnan(vals) | np.isfinite(vals)
        if not finite_or_nan.all():
            raise ValueError("non-missing values must be finite")
        ts.setflags(write=False)
        vals.setflags(write=False)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_values(
        cls,
        variables,
        rate_hz: float,
        values,
        start_time: float = 0.0,
    ) -> "TimeSeriesBatch":
        """Build a batch with timestamps start_time + k/rate_hz."""
        if not rate_hz > 0:
            raise ValueError(f"rate_hz must be > 0, got {rate_hz}")
        values = np.asarray(values, dtype=float)
        n = values.shape[0]
        timestamps = start_time + np.arange(n) / rate_hz
        return cls(tuple(variables), rate_hz, start_time, timestamps, values)

    # -- accessors -------------------------------------------------------------

    def __len__(self) -> int:
        return self.timestamps.shape[0]

    @property
    def n_rows(self) -> int:
        return self.timestamps.shape[0]

    def column(self, name: str) -> np.ndarray:
        """Return the series for one variable (read-only view)."""
        try:
            idx = self.variables.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None
        return self.values[:, idx]

    def has_missing(self) -> bool:
        return bool(np.isnan(self.values).any())

    def duration_s(self) -> float:
        """Time span covered by the rows (n / rate)."""
        return self.n_rows / self.rate_hz


# -- row-selection operations ----------------------------------------------


def subsample(batch: TimeSeriesBatch, factor: int) -> TimeSeriesBatch:
    """Keep every factor-th row (0, factor, 2*factor, ...), dividing the rate.

    Raises ValueError for factor < 1 and DataError when factor exceeds the
    row count (the result would not contain even the first stride).
    """
    if factor < 1:
        raise ValueError(f"subsample factor must be >= 1, got {factor}")
    if factor > batch.n_rows:
        raise DataError(
            f"subsample factor {factor} exceeds row count {batch.n_rows}: empty result"
        )
    if factor == 1:
        return batch
    ts = batch.timestamps[::factor]
    vals = batch.values[::factor]
    return TimeSeriesBatch(batch.variables, batch.rate_hz / factor, ts[0], ts, vals)


def slice_fraction(batch: TimeSeriesBatch, fraction: float) -> TimeSeriesBatch:
    """Return the first ceil(fraction * n) rows; rate unchanged."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    n_keep = math.ceil(fraction * batch.n_rows)
    if n_keep == batch.n_rows:
        return batch
    ts = batch.timestamps[:n_keep]
    vals = batch.values[:n_keep]
    return TimeSeriesBatch(batch.variables, batch.rate_hz, batch.start_time, ts, vals)


# -- value transforms --------------------------------------------------------


def standardize(batch: TimeSeriesBatch) -> TimeSeriesBatch:
    """Scale every variable to sample mean 0 and sample std 1 (ddof=1).

    Missing values are ignored in the statistics and stay missing. A
    variable with sample variance <= 1e-12 raises DegenerateDataError.
    """
    vals = batch.values.copy()
    with np.errstate(invalid="ignore"):
        mean = np.nanmean(vals, axis=0)
        std = np.nanstd(vals, axis=0, ddof=1)
    for j, name in enumerate(batch.variables):
        if not np.isfinite(std[j]) or std[j] ** 2 <= 1e-12:
            raise DegenerateDataError(f"variable {name!r} has degenerate variance")
    vals = (vals - mean) / std
    return TimeSeriesBatch(
        batch.variables, batch.rate_hz, batch.start_time, batch.timestamps, vals
    )


def interpolate_gaps(batch: TimeSeriesBatch, max_gap: int) -> list[TimeSeriesBatch]:
    """Fill short missing runs linearly and split the batch at long ones.

    Per variable, interior runs of <= max_gap consecutive NaNs are linearly
    interpolated from the bracketing samples. Leading/trailing runs are
    never extrapolated. Rows still containing a NaN afterwards are dropped,
    and the remaining contiguous row ranges are returned as separate
    batches, each satisfying the TimeSeriesBatch invariants.
    """
    if max_gap < 0:
        raise ValueError(f"max_gap must be >= 0, got {max_gap}")
    n = batch.n_rows
    if n == 0:
        return []
    vals = batch.values.copy()
    for j in range(vals.shape[1]):
        col = vals[:, j]
        missing = np.isnan(col)
        i = 0
        while i < n:
            if not missing[i]:
                i += 1
                continue
            run_start = i
            while i < n and missing[i]:
                i += 1
            run_len = i - run_start
            interior = run_start > 0 and i < n
            if interior and run_len <= max_gap:
                lo, hi = col[run_start - 1], col[i]
                steps = np.arange(1, run_len + 1) / (run_len + 1)
                col[run_start:i] = lo + steps * (hi - lo)
    good = ~np.isnan(vals).any(axis=1)
    segments: list[TimeSeriesBatch] = []
    i = 0
    while i < n:
        if not good[i]:
            i += 1
            continue
        seg_start = i
        while i < n and good[i]:
            i += 1
        ts = batch.timestamps[seg_start:i]
        segments.append(
            TimeSeriesBatch(batch.variables, batch.rate_hz, ts[0], ts, vals[seg_start:i])
        )
    return segments


# -- CSV persistence ----------------------------------------------------------
#
# Format: UTF-8, LF endings, no quoting. Header `timestamp,<var1>,...`,
# then comma-separated decimals (12 significant digits); empty cell = missing.


def _fmt(x: float) -> str:
    return "" if np.isnan(x) else format(x, ".12g")


def csv_header(variables) -> str:
    return "timestamp," + ",".join(variables)


def csv_row(timestamp: float, values) -> str:
    return format(timestamp, ".12g") + "," + ",".join(_fmt(v) for v in values)


def write_csv(batch: TimeSeriesBatch, path) -> None:
    """Write the batch in the interchange CSV format."""
    lines = [csv_header(batch.variables)]
    for t, row in zip(batch.timestamps, batch.values):
        lines.append(csv_row(t, row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path, rate_hz: float | None = None) -> TimeSeriesBatch:
    """Parse a batch CSV written by :func:`write_csv`.

    The rate is inferred from the first timestamp spacing unless given
    explicitly; a file with fewer than two rows needs rate_hz (defaults
    to 1.0 so a header-only file still parses to an empty batch).
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError(f"{path}: empty file, expected a header row")
    header = lines[0].split(",")
    if header[0] != "timestamp" or len(header) < 2:
        raise ParseError(f"{path}: row 1: malformed header {lines[0]!r}")
    variables = tuple(header[1:])
    n_cols = len(header)
    timestamps: list[float] = []
    rows: list[list[float]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != n_cols:
            raise ParseError(
                f"{path}: row {lineno}: expected {n_cols} columns, got {len(cells)}"
            )
        try:
            timestamps.append(float(cells[0]))
            rows.append([float(c) if c != "" else math.nan for c in cells[1:]])
        except ValueError:
            raise ParseError(f"{path}: row {lineno}: non-numeric cell") from None
    ts = np.asarray(timestamps)
    vals = np.asarray(rows) if rows else np.empty((0, len(variables)))
    if rate_hz is None:
        rate_hz = 1.0 / (ts[1] - ts[0]) if len(ts) >= 2 else 1.0
    start = ts[0] if len(ts) else 0.0
    try:
        return TimeSeriesBatch(variables, rate_hz, start, ts, vals)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
