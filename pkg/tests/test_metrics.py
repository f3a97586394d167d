import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from esn_denoise.chaos import MapParams, generate_orbit
from esn_denoise.metrics import (
    GainReport,
    aggregate,
    fill_aggregates,
    format_float,
    gain_db,
    snr_out,
    snr_out_ref,
    to_db,
)


def test_exact_estimate_is_infinite():
    d = np.linspace(-1, 1, 10)
    assert snr_out(d, d) == math.inf
    assert to_db(snr_out(d, d)) == math.inf


def test_null_estimate():
    d = np.linspace(-1, 1, 10)
    assert snr_out(np.zeros(10), d) == 0.0
    assert to_db(0.0) == -math.inf


def test_window_is_half_open():
    y = np.array([1.0, 1.0, 2.0, 2.0])
    d = np.array([0.0, 0.0, 1.0, 1.0])
    assert snr_out(y, d, 2, 4) == pytest.approx(8 / 2)
    with pytest.raises(ValueError):
        snr_out(y, d, 3, 3)
    with pytest.raises(ValueError):
        snr_out(y, d, 0, 5)


@pytest.mark.oracle("snr_literal_numerator")
def test_literal_numerator_uses_estimate_power():
    d = generate_orbit(MapParams(0.4, 0.2), 400_000).samples
    g = np.random.default_rng(0).standard_normal(len(d))
    y = d + g
    # independence: E[y^2] = E[d^2] + E[g^2], E[(d - y)^2] = E[g^2]
    p_d = np.mean(d**2)
    expected = (p_d + 1.0) / 1.0
    assert expected == pytest.approx(4 / 3, abs=0.01)
    assert snr_out(y, d) == pytest.approx(expected, rel=0.01)
    # the clean-signal numerator would give ~1/3, far from the literal form
    assert snr_out_ref(y, d) == pytest.approx(p_d, rel=0.01)


@pytest.mark.oracle("gain_db_arithmetic")
def test_gain_arithmetic():
    assert gain_db(1.0, 0.0) == 0.0
    assert gain_db(10**0.77, 2.0) == pytest.approx(7.7 - 2.0, abs=1e-12)
    assert gain_db(10**0.51, 2.0) == pytest.approx(5.1 - 2.0, abs=1e-12)
    with pytest.raises(ValueError):
        gain_db(0.0, 2.0)


@given(st.floats(-50, 50))
def test_db_round_trip(x):
    assert gain_db(10 ** (x / 10), 0.0) == pytest.approx(x, abs=1e-12)


def test_aggregate():
    assert aggregate([3, 3, 3]) == (3.0, 0.0)
    mean, std = aggregate([1, 2, 3, 4, 5])
    assert mean == 3.0
    assert std == pytest.approx(math.sqrt(2.5))
    assert aggregate([4.0]) == (4.0, 0.0)
    with pytest.raises(ValueError):
        aggregate([])


@given(st.lists(st.floats(-100, 100), min_size=2, max_size=20))
def test_std_non_negative(values):
    assert aggregate(values)[1] >= 0


def test_fill_aggregates_groups_by_method():
    reports = [GainReport(0.5, 2.0, 2.0 + g, g, method=m, rep=i)
               for i, (g, m) in enumerate([(1, "esn"), (3, "esn"), (0, "wiener"), (0, "wiener")])]
    fill_aggregates(reports)
    assert reports[0].gain_mean_db == 2.0 and reports[0].repetitions == 2
    assert reports[2].gain_std_db == 0.0
    for r in reports:
        assert r.gain_db == r.snr_out_db - r.snr_in_db


def test_format_float():
    assert format_float(math.inf) == "inf"
    assert format_float(-math.inf) == "-inf"
    assert float(format_float(0.1 + 0.2)) == 0.1 + 0.2
