"""Data-requirement sweeps: SHD and runtime vs sampling frequency / horizon.

Each sweep subsamples or truncates one batch, reruns discovery, and records
the structural Hamming distance against a baseline graph together with the
wall-clock time of the discovery call alone (file I/O excluded). Tables
from several seeds aggregate into per-parameter mean/std columns.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .causalgraph import CausalGraph, expected_hrsi_graph, shd
from .discovery import DiscoveryConfig, run_discovery
from .errors import IncompatibleTablesError, ParseError
from .timeseries import TimeSeriesBatch, slice_fraction, subsample

DEFAULT_RATES_HZ = (0.5, 1.0, 2.0, 5.0, 10.0)
DEFAULT_FRACTIONS = tuple(round(0.1 * k, 1) for k in range(1, 11))


@dataclass(frozen=True)
class SweepRow:
    param: float  # rate in Hz or horizon fraction
    seed: int
    shd: int
    runtime_s: float

    def __post_init__(self):
        if self.shd < 0 or self.runtime_s < 0:
            raise ValueError("shd and runtime_s must be >= 0")


@dataclass(frozen=True)
class SweepTable:
    kind: str  # "frequency" | "horizon"
    baseline: CausalGraph
    rows: tuple[SweepRow, ...]

    def __post_init__(self):
        if self.kind not in ("frequency", "horizon"):
            raise ValueError(f"unknown sweep kind {self.kind!r}")
        ordered = tuple(sorted(self.rows, key=lambda r: (r.param, r.seed)))
        object.__setattr__(self, "rows", ordered)

    def params(self) -> tuple[float, ...]:
        return tuple(sorted({r.param for r in self.rows}))


def _timed_discovery(batch: TimeSeriesBatch, cfg: DiscoveryConfig):
    t0 = time.perf_counter()
    graph = run_discovery(batch, cfg)
    return graph, time.perf_counter() - t0


def sweep_frequency(
    batch: TimeSeriesBatch,
    baseline: CausalGraph | None,
    rates_hz,
    cfg: DiscoveryConfig,
) -> SweepTable:
    """Rerun discovery at each sampling rate (must divide the batch rate)."""
    if baseline is None:
        baseline = expected_hrsi_graph()
    rows = []
    for rate in rates_hz:
        factor_f = batch.rate_hz / rate
        factor = round(factor_f)
        if factor < 1 or abs(factor_f - factor) > 1e-9:
            raise ValueError(
                f"rate {rate} Hz does not divide the batch rate {batch.rate_hz} Hz"
            )
        sub = subsample(batch, factor)
        graph, runtime = _timed_discovery(sub, cfg)
        rows.append(
            SweepRow(
                param=float(rate),
                seed=cfg.citest.seed,
                shd=shd(graph, baseline),
                runtime_s=runtime,
            )
        )
    return SweepTable("frequency", baseline, tuple(rows))


def sweep_horizon(
    batch: TimeSeriesBatch,
    baseline: CausalGraph | None,
    fractions,
    cfg: DiscoveryConfig,
) -> SweepTable:
    """Rerun discovery on growing prefixes of the batch."""
    if baseline is None:
        baseline = expected_hrsi_graph()
    rows = []
    for fraction in fractions:
        part = slice_fraction(batch, fraction)
        graph, runtime = _timed_discovery(part, cfg)
        rows.append(
            SweepRow(
                param=float(fraction),
                seed=cfg.citest.seed,
                shd=shd(graph, baseline),
                runtime_s=runtime,
            )
        )
    return SweepTable("horizon", baseline, tuple(rows))


# -- aggregation -----------------------------------------------------------------


@dataclass(frozen=True)
class AggregateRow:
    param: float
    mean_shd: float
    std_shd: float
    mean_runtime_s: float
    std_runtime_s: float


def aggregate(tables) -> tuple[AggregateRow, ...]:
    """Per-parameter sample mean and std (ddof=1; std 0 for a single value)."""
    tables = list(tables)
    if not tables:
        raise IncompatibleTablesError("no tables to aggregate")
    kind = tables[0].kind
    grid = tables[0].params()
    for t in tables[1:]:
        if t.kind != kind or t.params() != grid:
            raise IncompatibleTablesError(
                f"tables disagree on kind/grid: {kind}/{grid} vs {t.kind}/{t.params()}"
            )
    out = []
    for param in grid:
        # sorted so the reduction is exactly permutation-invariant over tables
        shds = np.sort(
            [r.shd for t in tables for r in t.rows if r.param == param]
        ).astype(float)
        times = np.sort(
            [r.runtime_s for t in tables for r in t.rows if r.param == param]
        )
        out.append(
            AggregateRow(
                param=param,
                mean_shd=float(shds.mean()),
                std_shd=float(shds.std(ddof=1)) if len(shds) > 1 else 0.0,
                mean_runtime_s=float(times.mean()),
                std_runtime_s=float(times.std(ddof=1)) if len(times) > 1 else 0.0,
            )
        )
    return tuple(out)


# -- CSV persistence ---------------------------------------------------------------

ROWS_HEADER = "param,seed,shd,runtime_s"
AGG_HEADER = "param,mean_shd,std_shd,mean_runtime_s,std_runtime_s"


def write_rows_csv(tables, path) -> None:
    """All rows of the given tables, sorted by (param, seed)."""
    rows = sorted(
        (r for t in tables for r in t.rows), key=lambda r: (r.param, r.seed)
    )
    lines = [ROWS_HEADER]
    for r in rows:
        lines.append(
            f"{r.param:.12g},{r.seed},{r.shd},{r.runtime_s:.12g}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_rows_csv(path, kind: str, baseline: CausalGraph | None = None) -> SweepTable:
    """Parse a rows CSV back into one table (inverse of write_rows_csv)."""
    if baseline is None:
        baseline = expected_hrsi_graph()
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != ROWS_HEADER:
        raise ParseError(f"{path}: row 1: expected header {ROWS_HEADER!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != 4:
            raise ParseError(f"{path}: row {lineno}: expected 4 columns")
        try:
            rows.append(
                SweepRow(
                    param=float(cells[0]),
                    seed=int(cells[1]),
                    shd=int(cells[2]),
                    runtime_s=float(cells[3]),
                )
            )
        except ValueError:
            raise ParseError(f"{path}: row {lineno}: non-numeric cell") from None
    return SweepTable(kind, baseline, tuple(rows))


def write_aggregate_csv(agg_rows, path) -> None:
    lines = [AGG_HEADER]
    for r in agg_rows:
        lines.append(
            f"{r.param:.12g},{r.mean_shd:.12g},{r.std_shd:.12g},"
            f"{r.mean_runtime_s:.12g},{r.std_runtime_s:.12g}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
