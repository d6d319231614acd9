import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from radarnet.diversity import (
    DiversityPolicy,
    assign_periods,
    assign_slopes,
    gate_by_duration,
    if_interference_duration,
    if_interference_duration_array,
)
from radarnet.interference import InterferenceStage, TimingModel, is_interfered
from radarnet.report import check_if_duration
from radarnet._validation import ParameterError


def test_degenerate_spread_gives_base_period():
    p = assign_periods(50, 100e-6, DiversityPolicy(period_spread=(1.0, 1.0)), 0)
    assert np.all(p == 100e-6)


def test_default_periods_in_range_and_centered():
    p = assign_periods(10**5, 100e-6, DiversityPolicy(), 4)
    assert p.min() >= 90e-6 and p.max() <= 110e-6
    assert p.mean() == pytest.approx(100e-6, rel=1e-3)


def test_slopes():
    base = 2.9982e13
    assert np.all(assign_slopes(20, base, DiversityPolicy(slope_sigma=0.0), 1) == base)
    s = assign_slopes(10**5, base, DiversityPolicy(slope_sigma=0.15), 2)
    assert np.std(s) / base == pytest.approx(0.15, abs=0.002)
    assert np.array_equal(s, assign_slopes(10**5, base, DiversityPolicy(slope_sigma=0.15), 2))


def test_slope_sigma_too_large():
    with pytest.raises(ParameterError):
        assign_slopes(3, 1e13, DiversityPolicy(slope_sigma=0.6), 0)


def test_duration_examples():
    assert if_interference_duration(0.0, 3e6, 60e-6) == 60e-6
    assert if_interference_duration(4.5e12, 3e6, 60e-6) == pytest.approx(1.3333e-6, rel=1e-4)
    assert if_interference_duration(9e12, 3e6, 60e-6) == pytest.approx(if_interference_duration(4.5e12, 3e6, 60e-6) / 2)


def test_gate_examples():
    pol = DiversityPolicy()
    assert gate_by_duration(60e-6, 60e-6, pol) is InterferenceStage.DECISION
    assert gate_by_duration(1.33e-6, 60e-6, pol) is InterferenceStage.IF
    assert gate_by_duration(0.8 * 60e-6, 60e-6, pol) is InterferenceStage.DECISION


@given(st.floats(-1e14, 1e14), st.floats(1e4, 1e8), st.floats(0, 1e-4), st.floats(1, 3))
def test_duration_monotone(dS, B, overlap, k):
    d = if_interference_duration(dS, B, overlap)
    assert if_interference_duration(dS * k, B, overlap) <= d
    assert if_interference_duration(dS, B * k, overlap) >= d
    assert if_interference_duration(dS, B, overlap * k) >= d
    assert if_interference_duration_array([dS], B, [overlap])[0] == pytest.approx(d)


def test_duration_matches_sample_level_support():
    assert check_if_duration(100, seed=3)["passed"]


def test_period_lock_and_window_fraction():
    tm = TimingModel(100e-6, 99e-6)
    k = np.arange(10**4)
    # identical periods: a hit on one pulse is a hit on every pulse
    tau_j = 0.3e-6 + k * tm.T_p
    assert np.all(is_interfered(k * tm.T_p, tau_j, 0.2e-6, tm))
    # distinct periods: the offset drifts through the window
    dT = 100e-6 * (math.sqrt(2) - 1) * 0.1
    offsets = np.mod(k * dT, tm.T_p)
    hits = is_interfered(0.0, offsets, 0.0, tm)
    # offset x hits when -x mod T_p lies in the window, i.e. x in [T_min, T_p] or x == 0
    assert hits.mean() == pytest.approx(tm.window_ratio, abs=2e-3)
