import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from radarnet.rx_chain import (
    DechirpScene,
    IFConfig,
    Interferer,
    Target,
    estimate_range,
    estimate_velocity,
    spectrum,
    synth_if_output,
)
from radarnet.waveform import SPEED_OF_LIGHT, ChirpConfig, range_resolution
from radarnet._validation import DomainError, ParameterError

CFG = ChirpConfig()
IFC = IFConfig.for_chirp(CFG, 512)


def on_bin_delay(k, ifc=IFC):
    return k * ifc.bin_width / CFG.slope_S


def test_empty_scene_is_zero():
    sig = synth_if_output(DechirpScene(), CFG, IFC)
    assert sig.samples.size == IFC.n_samples_M
    assert not np.any(sig.samples)
    assert estimate_range(sig, CFG, IFC) is None


def test_target_beat_frequency():
    sig = synth_if_output(DechirpScene(target=Target(1e-7)), CFG, IFC)
    dphi = np.angle(sig.samples[1:] * np.conj(sig.samples[:-1]))
    assert np.allclose(dphi * IFC.fs / (2 * np.pi), 2.9982e6, rtol=1e-9)


def test_target_and_equal_slope_interferer_give_two_tones():
    scene = DechirpScene(target=Target(on_bin_delay(40)), interferers=(Interferer(on_bin_delay(100)),))
    X = spectrum(synth_if_output(scene, CFG, IFC), IFC.n_samples_M)
    strong = np.flatnonzero(np.abs(X) > 1e-6 * np.abs(X).max())
    assert strong.tolist() == [40, 100]


def test_range_of_15m_target():
    est = estimate_range(synth_if_output(DechirpScene(target=Target(1e-7)), CFG, IFC), CFG, IFC)
    assert abs(est.distance - 15.0) <= range_resolution(CFG) * (1 + 1e-9)
    assert est.peak_power > 0


def test_two_peaks_reported_strongest_first():
    tau_t = 2 * 15.0 / SPEED_OF_LIGHT
    tau_i = 2 * 7.0 / SPEED_OF_LIGHT
    scene = DechirpScene(target=Target(tau_t, 1.0), interferers=(Interferer(tau_i, 0.0, 0.5),))
    est = estimate_range(synth_if_output(scene, CFG, IFC), CFG, IFC, max_targets=2)
    assert len(est.peaks) == 2
    assert abs(est.peaks[0].distance - 15.0) <= range_resolution(CFG)
    assert abs(est.peaks[1].distance - 7.0) <= range_resolution(CFG)
    assert est.distance == est.peaks[0].distance


def test_velocity_examples():
    assert np.allclose(estimate_velocity([0.4, 0.4, 0.4], 3.896e-3, 60e-6), 0.0)
    v = estimate_velocity([0.0, math.pi / 2], 3.896e-3, 60e-6)
    assert v[0] == pytest.approx(3.896e-3 / (8 * 60e-6))
    assert v[0] == pytest.approx(8.12, abs=0.005)
    below = estimate_velocity([0.0, math.pi - 1e-6], 3.896e-3, 60e-6)[0]
    above = estimate_velocity([0.0, math.pi + 1e-6], 3.896e-3, 60e-6)[0]
    assert below > 0 > above


def test_velocity_needs_two_phases():
    with pytest.raises(DomainError):
        estimate_velocity([0.1], 3.9e-3, 60e-6)


def test_target_beyond_period_rejected():
    with pytest.raises(ParameterError):
        synth_if_output(DechirpScene(target=Target(CFG.T_p)), CFG, IFC)


def test_ifconfig_validation():
    with pytest.raises(ParameterError):
        IFConfig(passband_B=1e6, fs=1e6, n_samples_M=512)
    with pytest.raises(ParameterError):
        IFConfig(passband_B=1e5, fs=1e6, n_samples_M=500)


@given(st.floats(1e-9, 5e-7), st.floats(0, 2 * math.pi), st.floats(-8e-7, 8e-7))
def test_parseval(tau, theta, tau_i):
    scene = DechirpScene(target=Target(tau, 1.0, theta), interferers=(Interferer(tau_i, 1e12, 0.7),))
    sig = synth_if_output(scene, CFG, IFC)
    X = spectrum(sig, IFC.n_samples_M)
    assert np.sum(np.abs(sig.samples) ** 2) == pytest.approx(np.sum(np.abs(X) ** 2) / IFC.n_samples_M, rel=1e-9)


@given(st.floats(0.5, 20.0), st.floats(0, 2 * math.pi))
def test_noiseless_range_error_within_resolution(d, theta):
    tau = 2 * d / SPEED_OF_LIGHT
    est = estimate_range(synth_if_output(DechirpScene(target=Target(tau, 1.0, theta)), CFG, IFC), CFG, IFC)
    assert abs(est.distance - d) <= range_resolution(CFG)


@given(st.floats(1e11, 5e13).map(float), st.sampled_from([-1.0, 1.0]), st.floats(-5e-7, 5e-7))
def test_chirped_interferer_support_is_contiguous_and_bounded(mag, sign, tau_i):
    dS = sign * mag
    sig = synth_if_output(DechirpScene(interferers=(Interferer(tau_i, dS),)), CFG, IFC)
    nz = np.flatnonzero(sig.samples)
    if nz.size:
        assert nz[-1] - nz[0] + 1 == nz.size
        assert nz.size / IFC.fs <= 2 * IFC.passband_B / abs(dS) + 1 / IFC.fs


def test_target_outside_passband_is_filtered():
    # beyond fs/2 the beat never reaches the ADC
    tau = 2 * 22.0 / SPEED_OF_LIGHT
    assert estimate_range(synth_if_output(DechirpScene(target=Target(tau)), CFG, IFC), CFG, IFC) is None
