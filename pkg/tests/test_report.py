import json
import math

import pytest

from radarnet import interference as itf
from radarnet.report import brute_force_interfered, compatibility_report, dumps, run_oracle_suite


def test_brute_force_oracle_examples():
    tm = itf.TimingModel(100e-6, 60e-6)
    assert brute_force_interfered(0.0, 0.0, 0.0, tm)
    assert not brute_force_interfered(0.0, 50e-6, 10e-6, tm)
    assert brute_force_interfered(0.0, 20e-6, 10e-6, tm)


def test_quick_oracle_suite_passes():
    res = run_oracle_suite(trials=2000, quick=True)
    assert all(v["passed"] for v in res.values()), {k: v["passed"] for k, v in res.items()}


@pytest.fixture(scope="module")
def compat():
    return compatibility_report(trials=5000, seed=1, amplitude_mode=-106.0)


def test_compatibility_entries(compat):
    by = {e["name"]: e for e in compat["entries"]}
    lens = by["lens_integral_quadrature"]
    assert lens["paper_value"] == pytest.approx(1 / (4 * math.pi))
    assert lens["oracle_value"] == pytest.approx(3 / (4 * math.pi), rel=1e-9)
    assert lens["relative_deviation"] == pytest.approx(2.0, rel=1e-9)
    assert by["interference_condition_aligned_boundary"]["oracle_value"] is True
    assert by["doppler_velocity_formula"]["oracle_value"] == pytest.approx(
        299792458.0 / 77e9 / (8 * 60e-6))
    assert by["rx_amplitude_mode_dBW"]["oracle_value"] == -106.0
    count = by["expected_interferer_count"]
    assert count["paper_value"] == pytest.approx(0.5)
    assert count["oracle_value"] == pytest.approx(0.4 * 0.001 * math.pi * 2500, rel=0.05)


def test_report_serialization_is_deterministic(compat):
    text = dumps(compat)
    assert text == dumps(json.loads(text))
    assert text == dumps(compatibility_report(trials=5000, seed=1, amplitude_mode=-106.0))
