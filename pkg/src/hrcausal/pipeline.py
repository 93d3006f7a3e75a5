"""Streaming batch pipeline: collect feature rows, hand batches to discovery.

One collector and one discovery worker run concurrently and communicate
only through the filesystem pool: the collector appends rows to an
in-progress file and atomically renames it to `batch_<seq:05>.csv` once
full; the worker picks up finalized batches oldest-first and drops a
`.graph` / `.dot` / `.timing` triple (or an `.error` record) next to each.
The worker lives in its own process, so discovery load can never stall
collection.
"""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass, field
from multiprocessing import get_context
from pathlib import Path

from .causalgraph import expected_hrsi_graph, read_graph, shd, to_dot, to_text
from .discovery import DiscoveryConfig, run_discovery
from .errors import DataError
from .features import trace_to_features
from .hrsim import WorldConfig
from .hrsim import run as run_sim
from .timeseries import csv_header, csv_row, read_csv

logger = logging.getLogger(__name__)

STOP_MARKER = "collect.done"
_PARTIAL_KEEP_FRACTION = 0.5


# -- row sources -----------------------------------------------------------------


class SimulateSource:
    """Feature rows from a fresh simulation covering duration_s of data.

    The simulator runs one tick past the duration so the finite-difference
    features span the full window (duration_s * rate rows).
    """

    def __init__(self, world: WorldConfig, duration_s: float):
        trace = run_sim(world, duration_s + world.dt)
        self._batch = trace_to_features(trace, R_enc=world.R_enc)

    @property
    def variables(self):
        return self._batch.variables

    @property
    def rate_hz(self) -> float:
        return self._batch.rate_hz

    def rows(self):
        yield from zip(self._batch.timestamps, self._batch.values)


class ReplaySource:
    """Feature rows replayed from a CSV, optionally paced by wall clock."""

    def __init__(self, path, realtime: bool = False, rate_hz: float | None = None):
        self._batch = read_csv(path, rate_hz)
        self.realtime = realtime

    @property
    def variables(self):
        return self._batch.variables

    @property
    def rate_hz(self) -> float:
        return self._batch.rate_hz

    def rows(self):
        if not self.realtime:
            yield from zip(self._batch.timestamps, self._batch.values)
            return
        t0 = time.perf_counter()
        for k, (t, row) in enumerate(zip(self._batch.timestamps, self._batch.values)):
            lag = t0 + k / self.rate_hz - time.perf_counter()
            if lag > 0:
                time.sleep(lag)
            yield t, row


# -- collection --------------------------------------------------------------------


@dataclass(frozen=True)
class CollectResult:
    rows_emitted: int
    rows_collected: int
    discarded_rows: int
    batch_files: tuple[str, ...]
    max_row_gap_s: float


def _next_seq(pool: Path) -> int:
    existing = sorted(pool.glob("batch_*.csv"))
    if not existing:
        return 0
    return max(int(p.stem.split("_")[1]) for p in existing) + 1


def collect(source, pool_dir, batch_len: int, max_batches: int | None = None) -> CollectResult:
    """Drain the source into fixed-length batch files in the pool.

    Batches are finalized atomically (write to a hidden .part file, then
    rename), so a concurrent reader never sees a half-written batch. On
    source exhaustion a partial batch is finalized only if at least half
    full; otherwise it is discarded with a log note.
    """
    if batch_len < 100:
        raise ValueError(f"batch_len must be >= 100, got {batch_len}")
    pool = Path(pool_dir)
    pool.mkdir(parents=True, exist_ok=True)
    seq = _next_seq(pool)
    header = csv_header(source.variables)

    finalized: list[str] = []
    rows_emitted = 0
    rows_collected = 0
    discarded = 0
    max_gap = 0.0
    last_time = None
    fh = None
    part_path = None
    rows_in_batch = 0

    def finalize():
        nonlocal fh, rows_in_batch, seq, rows_collected
        fh.close()
        final = pool / f"batch_{seq:05d}.csv"
        os.replace(part_path, final)
        finalized.append(final.name)
        rows_collected += rows_in_batch
        seq += 1
        fh = None
        rows_in_batch = 0

    try:
        for t, row in source.rows():
            now = time.perf_counter()
            if last_time is not None:
                max_gap = max(max_gap, now - last_time)
            last_time = now
            rows_emitted += 1
            if fh is None:
                part_path = pool / f".batch_{seq:05d}.csv.part"
                fh = open(part_path, "w", encoding="utf-8", newline="\n")
                fh.write(header + "\n")
            fh.write(csv_row(t, row) + "\n")
            rows_in_batch += 1
            if rows_in_batch == batch_len:
                finalize()
                if max_batches is not None and len(finalized) >= max_batches:
                    break
    finally:
        if fh is not None:
            fh.close()
            if rows_in_batch >= _PARTIAL_KEEP_FRACTION * batch_len:
                final = pool / f"batch_{seq:05d}.csv"
                os.replace(part_path, final)
                finalized.append(final.name)
                rows_collected += rows_in_batch
            else:
                os.unlink(part_path)
                discarded = rows_in_batch
                logger.info(
                    "discarding partial batch of %d rows (< 50%% of %d)",
                    rows_in_batch,
                    batch_len,
                )
    return CollectResult(
        rows_emitted=rows_emitted,
        rows_collected=rows_collected,
        discarded_rows=discarded,
        batch_files=tuple(finalized),
        max_row_gap_s=max_gap,
    )


# -- discovery worker -----------------------------------------------------------------


def _result_path(batch_path: Path, suffix: str) -> Path:
    return batch_path.with_suffix(suffix)


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def process_batch(batch_path, cfg: DiscoveryConfig) -> None:
    """Run discovery on one finalized batch and write its result files."""
    batch_path = Path(batch_path)
    batch = read_csv(batch_path)
    t0 = time.perf_counter()
    graph = run_discovery(batch, cfg)
    elapsed = time.perf_counter() - t0
    _atomic_write(_result_path(batch_path, ".dot"), to_dot(graph))
    _atomic_write(_result_path(batch_path, ".timing"), f"{elapsed:.6f}\n")
    # .graph last: its presence marks the batch fully processed.
    _atomic_write(_result_path(batch_path, ".graph"), to_text(graph))


def discovery_worker(
    pool_dir,
    cfg: DiscoveryConfig,
    poll_interval_s: float = 0.05,
    delay_s: float = 0.0,
) -> int:
    """Process finalized batches oldest-first until the pool is drained.

    Runs until the collector's stop marker exists and nothing is pending.
    A failing batch gets an .error record and the worker moves on. delay_s
    artificially slows each batch down (used to test asynchrony). Returns
    the number of batches handled.
    """
    pool = Path(pool_dir)
    handled = 0
    while True:
        batches = sorted(pool.glob("batch_*.csv"))
        pending = [
            p
            for p in batches
            if not _result_path(p, ".graph").exists()
            and not _result_path(p, ".error").exists()
        ]
        if not pending:
            if (pool / STOP_MARKER).exists():
                return handled
            time.sleep(poll_interval_s)
            continue
        batch_path = pending[0]
        if delay_s > 0:
            time.sleep(delay_s)
        try:
            process_batch(batch_path, cfg)
        except Exception as exc:  # isolate failures per batch
            logger.warning("discovery failed on %s: %s", batch_path.name, exc)
            _atomic_write(
                _result_path(batch_path, ".error"), f"{type(exc).__name__}: {exc}\n"
            )
        handled += 1


def _worker_entry(pool_dir: str, cfg_dict: dict, delay_s: float) -> None:
    logging.basicConfig(level=logging.WARNING)
    discovery_worker(pool_dir, DiscoveryConfig.from_dict(cfg_dict), delay_s=delay_s)


# -- pipeline configuration --------------------------------------------------------------


@dataclass(frozen=True)
class PipelineConfig:
    """Source, batching, pool location, and discovery settings."""

    source_kind: str  # "simulate" | "replay"
    rate_hz: float
    batch_len: int
    pool_dir: str
    discovery: DiscoveryConfig = field(default_factory=DiscoveryConfig)
    max_batches: int | None = None
    duration_s: float | None = None  # simulate
    world: WorldConfig | None = None  # simulate
    replay_path: str | None = None  # replay
    realtime: bool = False  # replay pacing

    def __post_init__(self):
        if self.source_kind not in ("simulate", "replay"):
            raise ValueError(f"unknown source kind {self.source_kind!r}")
        if self.batch_len < 100:
            raise ValueError(f"batch_len must be >= 100, got {self.batch_len}")
        if not self.rate_hz > 0:
            raise ValueError("rate_hz must be > 0")
        if self.source_kind == "simulate":
            if self.duration_s is None or self.duration_s <= 0:
                raise ValueError("simulate source needs duration_s > 0")
        elif self.replay_path is None:
            raise ValueError("replay source needs a path")


def load_pipeline_config(path) -> PipelineConfig:
    """Parse the JSON pipeline config file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid JSON: {exc}") from exc
    return pipeline_config_from_dict(doc)


def pipeline_config_from_dict(doc: dict) -> PipelineConfig:
    source = dict(doc.get("source", {}))
    kind = source.pop("kind", None)
    rate_hz = float(doc.get("rate_hz", 10.0))
    world = None
    duration_s = None
    replay_path = None
    realtime = False
    if kind == "simulate":
        duration_s = float(source.pop("duration_s", 0.0))
        world_fields = dict(source.pop("world", {}))
        world_fields.setdefault("dt", 1.0 / rate_hz)
        if abs(world_fields["dt"] * rate_hz - 1.0) > 1e-9:
            raise ValueError(
                f"world dt {world_fields['dt']} inconsistent with rate_hz {rate_hz}"
            )
        for key in ("goals", "robot_waypoints"):
            if key in world_fields:
                world_fields[key] = tuple(tuple(p) for p in world_fields[key])
        if "room" in world_fields:
            world_fields["room"] = tuple(world_fields["room"])
        world = WorldConfig(**world_fields)
    elif kind == "replay":
        replay_path = source.pop("path", None)
        realtime = bool(source.pop("realtime", False))
    else:
        raise ValueError(f"source.kind must be simulate or replay, got {kind!r}")
    if source:
        raise ValueError(f"unknown source field(s): {sorted(source)}")

    discovery = DiscoveryConfig.from_dict(doc.get("discovery", {}))
    max_batches = doc.get("max_batches")
    known = {"source", "rate_hz", "batch_len", "pool_dir", "discovery", "max_batches"}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown config field(s): {sorted(unknown)}")
    return PipelineConfig(
        source_kind=kind,
        rate_hz=rate_hz,
        batch_len=int(doc.get("batch_len", 1500)),
        pool_dir=str(doc.get("pool_dir", "pool")),
        discovery=discovery,
        max_batches=None if max_batches is None else int(max_batches),
        duration_s=duration_s,
        world=world,
        replay_path=replay_path,
        realtime=realtime,
    )


def build_source(cfg: PipelineConfig):
    if cfg.source_kind == "simulate":
        return SimulateSource(cfg.world or WorldConfig(dt=1.0 / cfg.rate_hz), cfg.duration_s)
    return ReplaySource(cfg.replay_path, realtime=cfg.realtime, rate_hz=cfg.rate_hz)


# -- end-to-end run ---------------------------------------------------------------------


@dataclass(frozen=True)
class BatchReport:
    name: str
    rows: int
    shd_vs_expected: int | None
    runtime_s: float | None
    error: str | None


@dataclass(frozen=True)
class PipelineSummary:
    rows_emitted: int
    rows_collected: int
    discarded_rows: int
    batches_finalized: int
    batches_processed: int
    max_collect_gap_s: float
    batches: tuple[BatchReport, ...]

    def to_dict(self) -> dict:
        return {
            "rows_emitted": self.rows_emitted,
            "rows_collected": self.rows_collected,
            "discarded_rows": self.discarded_rows,
            "batches_finalized": self.batches_finalized,
            "batches_processed": self.batches_processed,
            "max_collect_gap_s": self.max_collect_gap_s,
            "batches": [vars(b).copy() for b in self.batches],
        }


def summarize_pool(pool_dir, coll: CollectResult) -> PipelineSummary:
    pool = Path(pool_dir)
    reports = []
    processed = 0
    baseline = expected_hrsi_graph()
    for name in coll.batch_files:
        batch_path = pool / name
        with open(batch_path, "r", encoding="utf-8") as fh:
            rows = sum(1 for _ in fh) - 1
        runtime = None
        shd_val = None
        error = None
        timing_path = _result_path(batch_path, ".timing")
        if timing_path.exists():
            runtime = float(timing_path.read_text().strip())
        graph_path = _result_path(batch_path, ".graph")
        error_path = _result_path(batch_path, ".error")
        if graph_path.exists():
            processed += 1
            graph = read_graph(graph_path)
            if (
                set(graph.variables) == set(baseline.variables)
                and graph.tau_max == baseline.tau_max
            ):
                shd_val = shd(graph, baseline)
        elif error_path.exists():
            processed += 1
            error = error_path.read_text().strip()
        reports.append(
            BatchReport(
                name=name,
                rows=rows,
                shd_vs_expected=shd_val,
                runtime_s=runtime,
                error=error,
            )
        )
    return PipelineSummary(
        rows_emitted=coll.rows_emitted,
        rows_collected=coll.rows_collected,
        discarded_rows=coll.discarded_rows,
        batches_finalized=len(coll.batch_files),
        batches_processed=processed,
        max_collect_gap_s=coll.max_row_gap_s,
        batches=tuple(reports),
    )


def run_pipeline(cfg: PipelineConfig, worker_delay_s: float = 0.0) -> PipelineSummary:
    """Collect and discover concurrently; returns the run summary.

    The worker runs in a separate process so collection pacing is immune
    to discovery load; handoff happens purely through the pool directory.
    Worker failures never abort collection.
    """
    pool = Path(cfg.pool_dir)
    pool.mkdir(parents=True, exist_ok=True)
    marker = pool / STOP_MARKER
    if marker.exists():
        marker.unlink()

    ctx = get_context("spawn")
    worker = ctx.Process(
        target=_worker_entry,
        args=(str(pool), cfg.discovery.to_dict(), worker_delay_s),
        daemon=True,
    )
    worker.start()
    try:
        source = build_source(cfg)
        coll = collect(source, pool, cfg.batch_len, cfg.max_batches)
    finally:
        marker.touch()
        worker.join()
    return summarize_pool(pool, coll)
