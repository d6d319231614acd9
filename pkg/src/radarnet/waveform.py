"""FMCW chirp parameters and reference-scale chirp synthesis.

Sampling a 77 GHz chirp directly is not practical, so :func:`synth_chirp` is
meant for down-scaled parameter sets (carrier in the kHz to MHz range).  The
network-scale code paths work on the dechirped IF signal instead, see
:mod:`radarnet.rx_chain`.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import (
    DomainError,
    ParameterError,
    as_complex_array,
    check_finite,
    check_positive,
)

SPEED_OF_LIGHT = 299792458.0

# TI AWR1243 class parameters used throughout the examples and defaults.
DEFAULT_F0 = 77e9
DEFAULT_SLOPE = 2.9982e13
DEFAULT_CHIRP_DURATION = 60e-6
DEFAULT_PULSE_PERIOD = 100e-6


@dataclass(frozen=True)
class ChirpConfig:
    """Parameters of one FMCW radar.

    Attributes:
        f0: Start frequency of the chirp in Hz.
        slope_S: Frequency slope in Hz/s.
        T_c: Chirp duration in s.
        T_p: Pulse repetition period in s.
        T_min: Minimum IF overlap needed for ranging in s. ``T_p - T_min`` is
            the arrival window in which an interfering pulse survives to the
            ranging stage.
        amplitude_A: Linear transmit amplitude.
    """

    f0: float = DEFAULT_F0
    slope_S: float = DEFAULT_SLOPE
    T_c: float = DEFAULT_CHIRP_DURATION
    T_p: float = DEFAULT_PULSE_PERIOD
    T_min: float = 99e-6
    amplitude_A: float = 1.0

    def __post_init__(self):
        check_finite(self.f0, "f0")
        check_positive(self.slope_S, "slope_S")
        check_positive(self.T_c, "T_c")
        check_positive(self.T_p, "T_p")
        check_positive(self.T_min, "T_min")
        check_finite(self.amplitude_A, "amplitude_A")
        if self.T_c > self.T_p:
            raise ParameterError(f"T_c ({self.T_c}) must not exceed T_p ({self.T_p})")
        if self.T_min >= self.T_p:
            raise ParameterError(f"T_min ({self.T_min}) must be < T_p ({self.T_p})")

    @property
    def bandwidth(self):
        """Frequency sweep ``S * T_c`` of one chirp in Hz."""
        return self.slope_S * self.T_c

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.f0


@dataclass(frozen=True)
class SampledSignal:
    """Uniformly sampled complex baseband signal."""

    fs: float
    start_time: float = 0.0
    samples: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        check_positive(self.fs, "fs")
        check_finite(self.start_time, "start_time")
        object.__setattr__(self, "samples", as_complex_array(self.samples))

    def __len__(self):
        return self.samples.size

    @property
    def times(self):
        return self.start_time + np.arange(self.samples.size) / self.fs

    def power(self):
        """Mean power of the samples (0 for an empty signal)."""
        if self.samples.size == 0:
            return 0.0
        return float(np.mean(np.abs(self.samples) ** 2))


def synth_chirp(cfg, fs, pulse_phase=0.0, duration=None):
    """Synthesize one complex chirp pulse starting at ``t = 0``.

    Inside ``[0, T_c)`` a sample at time ``t`` has phase
    ``2*pi*(f0*t + S*t**2/2) + pulse_phase``; outside the chirp window the
    samples are exactly zero.

    Args:
        cfg: Chirp parameters, normally a down-scaled set.
        fs: Sample rate in Hz. Must exceed twice the swept bandwidth.
        pulse_phase: Per-pulse phase offset in radians.
        duration: Length of the returned record in s, at most ``T_p``.
            Defaults to ``T_c``.
    """
    fs = check_positive(fs, "fs")
    pulse_phase = check_finite(pulse_phase, "pulse_phase")
    duration = cfg.T_c if duration is None else check_positive(duration, "duration")
    if duration > cfg.T_p * (1 + 1e-12):
        raise ParameterError(f"duration {duration} exceeds the pulse period {cfg.T_p}")
    if fs <= 2 * cfg.bandwidth:
        raise ParameterError(
            f"fs={fs} does not resolve the {cfg.bandwidth} Hz sweep; use a down-scaled config"
        )

    n = int(np.floor(duration * fs + 1e-9))
    t = np.arange(n) / fs
    phase = 2 * np.pi * (cfg.f0 * t + 0.5 * cfg.slope_S * t**2) + pulse_phase
    window = t < cfg.T_c
    samples = np.where(window, cfg.amplitude_A * np.exp(1j * phase), 0.0)
    return SampledSignal(fs=fs, start_time=0.0, samples=samples)


def instantaneous_frequency(cfg, t):
    """Return ``f0 + S*t`` for ``t`` inside the chirp window ``[0, T_c]``."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t_arr)) or np.any(t_arr < 0) or np.any(t_arr > cfg.T_c):
        raise DomainError(f"t must lie in [0, T_c={cfg.T_c}]")
    f = cfg.f0 + cfg.slope_S * t_arr
    return float(f) if f.ndim == 0 else f


def range_resolution(cfg):
    """Distance resolution ``c / (2 S T_c)`` in metres."""
    return SPEED_OF_LIGHT / (2.0 * cfg.slope_S * cfg.T_c)
