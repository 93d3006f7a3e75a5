import math

import numpy as np
import pytest

from hrcausal.errors import DataError, DegenerateDataError, ParseError
from hrcausal.timeseries import (
    TimeSeriesBatch,
    interpolate_gaps,
    read_csv,
    slice_fraction,
    standardize,
    subsample,
    write_csv,
)

from conftest import make_white_noise


def make_batch(n=1500, rate=10.0, n_vars=3, seed=0):
    rng = np.random.default_rng(seed)
    names = tuple(f"x{i}" for i in range(n_vars))
    return TimeSeriesBatch.from_values(names, rate, rng.standard_normal((n, n_vars)))


# -- invariants --------------------------------------------------------------


def test_rejects_bad_spacing():
    ts = np.array([0.0, 0.1, 0.3])
    with pytest.raises(ValueError, match="spaced"):
        TimeSeriesBatch(("a",), 10.0, 0.0, ts, np.zeros((3, 1)))


def test_rejects_nonpositive_rate():
    with pytest.raises(ValueError, match="rate_hz"):
        TimeSeriesBatch.from_values(("a",), 0.0, np.zeros((3, 1)))


def test_rejects_shape_mismatch():
    with pytest.raises(ValueError, match="shape"):
        TimeSeriesBatch(("a", "b"), 10.0, 0.0, np.arange(3) / 10.0, np.zeros((3, 3)))


def test_rejects_infinite_values():
    vals = np.zeros((3, 1))
    vals[1, 0] = np.inf
    with pytest.raises(ValueError, match="finite"):
        TimeSeriesBatch.from_values(("a",), 10.0, vals)


def test_nan_is_the_missing_marker():
    vals = np.zeros((3, 1))
    vals[1, 0] = np.nan
    b = TimeSeriesBatch.from_values(("a",), 10.0, vals)
    assert b.has_missing()


def test_values_are_read_only():
    b = make_batch(10)
    with pytest.raises(ValueError):
        b.values[0, 0] = 1.0


# -- subsample ---------------------------------------------------------------


def test_subsample_identity():
    b = make_batch(100)
    assert subsample(b, 1) is b


def test_subsample_paper_rates():
    b = make_batch(1500, rate=10.0)
    out = subsample(b, 20)
    assert out.n_rows == 75
    assert out.rate_hz == pytest.approx(0.5)
    out2 = subsample(b, 2)
    assert out2.n_rows == 750
    assert out2.rate_hz == pytest.approx(5.0)
    np.testing.assert_array_equal(out2.values, b.values[::2])


def test_subsample_rejects_zero_factor():
    with pytest.raises(ValueError):
        subsample(make_batch(10), 0)


def test_subsample_factor_beyond_rows():
    with pytest.raises(DataError, match="empty"):
        subsample(make_batch(10), 11)


def test_subsample_composes():
    b = make_batch(840)
    for a, c in [(2, 3), (4, 5), (3, 7)]:
        lhs = subsample(b, a * c)
        rhs = subsample(subsample(b, a), c)
        np.testing.assert_array_equal(lhs.values, rhs.values)
        np.testing.assert_array_equal(lhs.timestamps, rhs.timestamps)


# -- slice_fraction ----------------------------------------------------------


def test_slice_identity():
    b = make_batch(100)
    assert slice_fraction(b, 1.0) is b


def test_slice_fraction_40_percent():
    # ceil(0.4 * 1500) rows; at 10 Hz that prefix covers 60 s of data
    b = make_batch(1500, rate=10.0)
    out = slice_fraction(b, 0.4)
    assert out.n_rows == 600
    assert out.duration_s() == pytest.approx(60.0)
    assert out.rate_hz == b.rate_hz


def test_slice_fraction_10_percent():
    assert slice_fraction(make_batch(1500), 0.1).n_rows == 150


def test_slice_fraction_rejects_out_of_range():
    b = make_batch(10)
    for bad in (0.0, -0.5, 1.01):
        with pytest.raises(ValueError):
            slice_fraction(b, bad)


def test_slice_then_subsample_commutes_within_one_row():
    b = make_batch(1000)
    for frac, factor in [(0.5, 4), (0.3, 5), (0.7, 2)]:
        a = subsample(slice_fraction(b, frac), factor)
        c = slice_fraction(subsample(b, factor), frac)
        assert abs(a.n_rows - c.n_rows) <= 1
        m = min(a.n_rows, c.n_rows)
        np.testing.assert_array_equal(a.values[:m], c.values[:m])


# -- standardize -------------------------------------------------------------


def test_standardize_two_pass_oracle():
    b = make_batch(500, seed=3)
    out = standardize(b)
    # independent two-pass mean/variance computation per variable
    for j in range(3):
        col = b.values[:, j]
        mean = sum(col) / len(col)
        var = sum((c - mean) ** 2 for c in col) / (len(col) - 1)
        expected = (col - mean) / math.sqrt(var)
        np.testing.assert_allclose(out.values[:, j], expected, atol=1e-9)
        assert abs(out.values[:, j].mean()) < 1e-9
        assert abs(out.values[:, j].std(ddof=1) - 1.0) < 1e-9


def test_standardize_idempotent():
    out1 = standardize(make_batch(300, seed=5))
    out2 = standardize(out1)
    np.testing.assert_allclose(out1.values, out2.values, atol=1e-9)


def test_standardize_rejects_constant_variable():
    vals = np.random.default_rng(0).standard_normal((50, 2))
    vals[:, 1] = 3.14
    b = TimeSeriesBatch.from_values(("a", "flat"), 10.0, vals)
    with pytest.raises(DegenerateDataError, match="flat"):
        standardize(b)


# -- interpolate_gaps ---------------------------------------------------------


def test_interpolate_no_missing_is_identity():
    b = make_batch(100)
    segs = interpolate_gaps(b, 3)
    assert len(segs) == 1
    np.testing.assert_array_equal(segs[0].values, b.values)


def test_interpolate_single_gap_midpoint():
    vals = np.array([[1.0], [np.nan], [3.0]])
    b = TimeSeriesBatch.from_values(("a",), 10.0, vals)
    (seg,) = interpolate_gaps(b, 1)
    np.testing.assert_allclose(seg.values[:, 0], [1.0, 2.0, 3.0])


def test_interpolate_long_gap_splits():
    n, gap = 50, 4
    vals = np.random.default_rng(1).standard_normal((n, 2))
    vals[20 : 20 + gap, 0] = np.nan
    b = TimeSeriesBatch.from_values(("a", "b"), 10.0, vals)
    segs = interpolate_gaps(b, gap - 1)
    assert len(segs) == 2
    assert sum(s.n_rows for s in segs) == n - gap
    assert segs[1].start_time == pytest.approx(b.timestamps[20 + gap])


def test_interpolate_trims_leading_and_trailing():
    vals = np.random.default_rng(2).standard_normal((30, 1))
    vals[:3, 0] = np.nan
    vals[-2:, 0] = np.nan
    (seg,) = interpolate_gaps(TimeSeriesBatch.from_values(("a",), 10.0, vals), 5)
    assert seg.n_rows == 25
    assert not seg.has_missing()


# -- CSV persistence -----------------------------------------------------------


def test_csv_round_trip(tmp_path):
    b = make_batch(200, seed=7)
    vals = b.values.copy()
    vals[10, 1] = np.nan
    vals[11, 1] = np.nan
    b = TimeSeriesBatch.from_values(b.variables, b.rate_hz, vals, b.start_time)
    path = tmp_path / "batch.csv"
    write_csv(b, path)
    back = read_csv(path)
    assert back.variables == b.variables
    assert back.n_rows == b.n_rows
    assert back.rate_hz == pytest.approx(b.rate_hz, rel=1e-9)
    np.testing.assert_array_equal(np.isnan(back.values), np.isnan(b.values))
    np.testing.assert_allclose(
        back.values[~np.isnan(b.values)], b.values[~np.isnan(b.values)], rtol=1e-9
    )


def test_csv_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("timestamp,v,d_g,r\n")
    b = read_csv(path)
    assert b.n_rows == 0
    assert b.variables == ("v", "d_g", "r")


def test_csv_ragged_row_reports_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("timestamp,a,b,c\n0.0,1,2,3\n0.1,1,2\n")
    with pytest.raises(ParseError, match="row 3"):
        read_csv(path)


def test_csv_non_numeric_cell(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("timestamp,a\n0.0,1\n0.1,oops\n")
    with pytest.raises(ParseError, match="row 3"):
        read_csv(path)


def test_csv_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,a\n0.0,1\n")
    with pytest.raises(ParseError, match="header"):
        read_csv(path)


def test_csv_format_is_stable(tmp_path):
    b = make_white_noise(5, seed=1, n_vars=2)
    path = tmp_path / "b.csv"
    write_csv(b, path)
    text = path.read_text()
    assert text.startswith("timestamp,x0,x1\n")
    assert "\r" not in text
    assert '"' not in text
