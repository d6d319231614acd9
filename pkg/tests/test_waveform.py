import numpy as np
import pytest
from hypothesis import given, strategies as st

from radarnet.waveform import (
    SPEED_OF_LIGHT,
    ChirpConfig,
    instantaneous_frequency,
    range_resolution,
    synth_chirp,
)
from radarnet._validation import DomainError, ParameterError

SMALL = ChirpConfig(f0=2e5, slope_S=1e9, T_c=1e-3, T_p=2e-3, T_min=1.5e-3)


def test_sweep_at_default_parameters():
    assert ChirpConfig().bandwidth == pytest.approx(1.79892e9, rel=1e-12)


def test_instantaneous_frequency_examples():
    cfg = ChirpConfig()
    assert instantaneous_frequency(cfg, 0.0) == 77e9
    assert instantaneous_frequency(cfg, 60e-6) == pytest.approx(7.879892e10, rel=1e-12)


def test_zero_slope_rejected():
    with pytest.raises(ParameterError):
        ChirpConfig(slope_S=0.0)


def test_frequency_outside_chirp_is_domain_error():
    with pytest.raises(DomainError):
        instantaneous_frequency(ChirpConfig(), 61e-6)


def test_range_resolution():
    cfg = ChirpConfig()
    assert range_resolution(cfg) == pytest.approx(0.0833257, rel=1e-6)
    assert range_resolution(ChirpConfig(T_c=120e-6, T_p=200e-6, T_min=199e-6)) == pytest.approx(
        range_resolution(cfg) / 2)
    assert range_resolution(ChirpConfig(slope_S=2 * cfg.slope_S)) == pytest.approx(range_resolution(cfg) / 2)
    assert range_resolution(cfg) * 2 * cfg.slope_S * cfg.T_c == pytest.approx(SPEED_OF_LIGHT, rel=1e-15)


def test_chirp_starts_at_f0():
    fs = 1e7
    sig = synth_chirp(SMALL, fs)
    dphi = np.angle(sig.samples[1] * np.conj(sig.samples[0]))
    # first-difference frequency over one sample, S/(2 fs) bias removed
    f = dphi * fs / (2 * np.pi) - SMALL.slope_S / (2 * fs)
    assert f == pytest.approx(SMALL.f0, rel=1e-6)


def test_samples_after_chirp_are_zero():
    fs = 1e7
    sig = synth_chirp(SMALL, fs, duration=SMALL.T_p)
    t = sig.times
    assert np.all(sig.samples[t >= SMALL.T_c] == 0)
    assert np.all(np.abs(sig.samples[t < SMALL.T_c]) > 0)


def test_unwrapped_phase_matches_integral():
    fs = 1e7
    sig = synth_chirp(SMALL, fs, pulse_phase=0.3)
    t = sig.times
    expected = 2 * np.pi * (SMALL.f0 * t + 0.5 * SMALL.slope_S * t**2) + 0.3
    got = np.unwrap(np.angle(sig.samples))
    got += np.round((expected[0] - got[0]) / (2 * np.pi)) * 2 * np.pi
    assert np.max(np.abs(got - expected)) < 1e-6


def test_undersampled_chirp_rejected():
    with pytest.raises(ParameterError):
        synth_chirp(ChirpConfig(), 1e9)


@pytest.mark.parametrize("fs", [0.0, -1.0, np.inf, np.nan])
def test_bad_sample_rate(fs):
    with pytest.raises(ParameterError):
        synth_chirp(SMALL, fs)


@given(st.floats(0, 1e-3))
def test_frequency_is_affine_with_slope_S(t):
    cfg = ChirpConfig(f0=1e6, slope_S=1e9, T_c=1.001e-3, T_p=2e-3, T_min=1.5e-3)
    h = 1e-6
    d = (instantaneous_frequency(cfg, t + h) - instantaneous_frequency(cfg, t)) / h
    assert d == pytest.approx(cfg.slope_S, rel=1e-9)
