import numpy as np
import pytest

from hrcausal.causalgraph import CausalGraph, LaggedEdge, shd
from hrcausal.citest import CITestConfig
from hrcausal.discovery import DiscoveryConfig, run_discovery
from hrcausal.errors import IncompatibleTablesError
from hrcausal.sweeps import (
    DEFAULT_FRACTIONS,
    DEFAULT_RATES_HZ,
    SweepRow,
    SweepTable,
    aggregate,
    read_rows_csv,
    sweep_frequency,
    sweep_horizon,
    write_rows_csv,
    write_aggregate_csv,
)
from hrcausal.timeseries import slice_fraction, subsample

from conftest import make_var_chain

VAR_TRUTH = CausalGraph(
    ("x0", "x1", "x2"), 1, (LaggedEdge("x0", "x1", 1), LaggedEdge("x1", "x2", 1))
)


def cfg(seed=0):
    return DiscoveryConfig(method="pcmci", citest=CITestConfig("parcorr", seed=seed))


def test_default_grids_match_scenario():
    assert DEFAULT_RATES_HZ == (0.5, 1.0, 2.0, 5.0, 10.0)
    assert DEFAULT_FRACTIONS == (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


# -- frequency sweep ------------------------------------------------------------


def test_frequency_single_rate_matches_direct_discovery():
    batch = make_var_chain(1200, seed=0)
    table = sweep_frequency(batch, VAR_TRUTH, [batch.rate_hz], cfg())
    assert len(table.rows) == 1
    direct = shd(run_discovery(batch, cfg()), VAR_TRUTH)
    assert table.rows[0].shd == direct
    assert table.rows[0].param == batch.rate_hz


def test_frequency_default_grid_on_10hz_batch():
    batch = make_var_chain(1500, seed=1)
    table = sweep_frequency(batch, VAR_TRUTH, DEFAULT_RATES_HZ, cfg())
    assert [r.param for r in table.rows] == [0.5, 1.0, 2.0, 5.0, 10.0]
    for rate in DEFAULT_RATES_HZ:
        row = next(r for r in table.rows if r.param == rate)
        sub = subsample(batch, round(batch.rate_hz / rate))
        assert row.shd == shd(run_discovery(sub, cfg()), VAR_TRUTH)


def test_frequency_rejects_non_integer_factor():
    batch = make_var_chain(600, seed=2)
    with pytest.raises(ValueError, match="3"):
        sweep_frequency(batch, VAR_TRUTH, [3.0], cfg())


def test_frequency_default_baseline_is_expected_graph():
    raw = make_var_chain(600, seed=3)
    from hrcausal.timeseries import TimeSeriesBatch

    batch = TimeSeriesBatch.from_values(("v", "d_g", "r"), raw.rate_hz, raw.values)
    table = sweep_frequency(batch, None, [10.0], cfg())
    assert set(table.baseline.variables) == {"v", "d_g", "r"}
    assert len(table.baseline.edges) == 4


# -- horizon sweep ---------------------------------------------------------------


def test_horizon_full_fraction_matches_direct_discovery():
    batch = make_var_chain(1200, seed=4)
    table = sweep_horizon(batch, VAR_TRUTH, [1.0], cfg())
    assert table.rows[0].shd == shd(run_discovery(batch, cfg()), VAR_TRUTH)


def test_horizon_default_grid_has_ten_rows():
    batch = make_var_chain(800, seed=5)
    table = sweep_horizon(batch, VAR_TRUTH, DEFAULT_FRACTIONS, cfg())
    assert len(table.rows) == 10
    assert [r.param for r in table.rows] == sorted(r.param for r in table.rows)


def test_horizon_rows_reproducible_in_isolation():
    batch = make_var_chain(1000, seed=6)
    table = sweep_horizon(batch, VAR_TRUTH, [0.3, 0.7], cfg(seed=9))
    for row in table.rows:
        part = slice_fraction(batch, row.param)
        again = shd(run_discovery(part, cfg(seed=9)), VAR_TRUTH)
        assert again == row.shd


def test_horizon_runtime_grows_with_fraction():
    means = {0.1: [], 1.0: []}
    for seed in range(5):
        batch = make_var_chain(3000, seed=seed)
        table = sweep_horizon(batch, VAR_TRUTH, [0.1, 1.0], cfg(seed))
        for row in table.rows:
            means[row.param].append(row.runtime_s)
    assert np.mean(means[1.0]) >= np.mean(means[0.1])


# -- aggregation --------------------------------------------------------------------


def table_of(kind, rows):
    return SweepTable(kind, VAR_TRUTH, tuple(SweepRow(*r) for r in rows))


def test_aggregate_single_table_has_zero_std():
    t = table_of("horizon", [(0.5, 0, 2, 1.0), (1.0, 0, 1, 2.0)])
    agg = aggregate([t])
    assert [a.param for a in agg] == [0.5, 1.0]
    assert all(a.std_shd == 0.0 and a.std_runtime_s == 0.0 for a in agg)
    assert agg[0].mean_shd == 2.0


def test_aggregate_identical_tables_zero_std():
    t = table_of("frequency", [(1.0, 0, 3, 0.5)])
    agg = aggregate([t, t])
    assert agg[0].std_shd == 0.0


def test_aggregate_hand_checked_sample_stats():
    a = table_of("horizon", [(0.5, 0, 2, 1.0)])
    b = table_of("horizon", [(0.5, 1, 4, 3.0)])
    (row,) = aggregate([a, b])
    assert row.mean_shd == pytest.approx(3.0)
    assert row.std_shd == pytest.approx(np.sqrt(2.0))
    assert row.mean_runtime_s == pytest.approx(2.0)
    assert row.std_runtime_s == pytest.approx(np.sqrt(2.0))


def test_aggregate_permutation_invariant():
    tables = [
        table_of("horizon", [(0.5, s, s, 0.1 * s), (1.0, s, 2 * s, 0.2)])
        for s in range(4)
    ]
    forward = aggregate(tables)
    backward = aggregate(tables[::-1])
    assert forward == backward


def test_aggregate_rejects_mismatched_grids():
    a = table_of("horizon", [(0.5, 0, 1, 1.0)])
    b = table_of("horizon", [(0.7, 0, 1, 1.0)])
    with pytest.raises(IncompatibleTablesError):
        aggregate([a, b])
    c = table_of("frequency", [(0.5, 0, 1, 1.0)])
    with pytest.raises(IncompatibleTablesError):
        aggregate([a, c])


# -- CSV round trip --------------------------------------------------------------------


def test_rows_csv_round_trip(tmp_path):
    t1 = table_of("horizon", [(0.5, 0, 2, 1.25), (1.0, 0, 0, 2.5)])
    t2 = table_of("horizon", [(0.5, 1, 3, 1.5), (1.0, 1, 1, 2.75)])
    path = tmp_path / "rows.csv"
    write_rows_csv([t1, t2], path)
    back = read_rows_csv(path, "horizon", VAR_TRUTH)
    assert back.rows == tuple(sorted(t1.rows + t2.rows, key=lambda r: (r.param, r.seed)))


def test_aggregate_csv_format(tmp_path):
    t = table_of("frequency", [(0.5, 0, 2, 1.0), (10.0, 0, 0, 3.0)])
    path = tmp_path / "agg.csv"
    write_aggregate_csv(aggregate([t]), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "param,mean_shd,std_shd,mean_runtime_s,std_runtime_s"
    assert len(lines) == 3


def test_sweep_row_validation():
    with pytest.raises(ValueError):
        SweepRow(param=1.0, seed=0, shd=-1, runtime_s=0.1)
    with pytest.raises(ValueError):
        SweepTable("weird", VAR_TRUTH, ())
