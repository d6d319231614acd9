"""Dechirped IF synthesis, brick-wall IF gating and range/velocity estimation.

Everything here works at ADC scale: the mixer output is written down in
closed form instead of mixing two RF chirps numerically, and the
high-frequency mixing product is treated as perfectly filtered.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from ._validation import (
    DomainError,
    ParameterError,
    check_count,
    check_finite,
    check_nonnegative,
    check_positive,
    is_power_of_two,
)
from .waveform import SPEED_OF_LIGHT, SampledSignal


@dataclass(frozen=True)
class Target:
    """Legitimate echo: round-trip delay, amplitude and phase."""

    delay_tau: float
    amp_A1: float = 1.0
    phase_theta: float = 0.0


@dataclass(frozen=True)
class Interferer:
    """One interfering chirp as seen after the victim's mixer.

    The mixer output of this component has instantaneous frequency
    ``slope_delta * (t - start_t0) + S * offset_tau_prime`` while it is
    active, i.e. on ``[start_t0, start_t0 + overlap)``.  ``offset_tau_prime``
    is signed: a negative offset is an interfering pulse that leads the local
    chirp and lands at a negative beat frequency.
    """

    offset_tau_prime: float
    slope_delta: float = 0.0
    amp_A2: float = 1.0
    phase_theta_prime: float = 0.0
    start_t0: float = 0.0
    overlap: float = math.inf


@dataclass(frozen=True)
class DechirpScene:
    target: Optional[Target] = None
    interferers: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "interferers", tuple(self.interferers))


@dataclass(frozen=True)
class IFConfig:
    """IF filter and ADC settings.

    Attributes:
        passband_B: One-sided passband of the ideal IF filter in Hz.
        fs: Complex ADC sample rate in Hz.
        n_samples_M: DFT length, a power of two.
    """

    passband_B: float
    fs: float
    n_samples_M: int

    def __post_init__(self):
        check_positive(self.passband_B, "passband_B")
        check_positive(self.fs, "fs")
        check_count(self.n_samples_M, "n_samples_M", minimum=1)
        if not is_power_of_two(self.n_samples_M):
            raise ParameterError(f"n_samples_M must be a power of two, got {self.n_samples_M}")
        if self.passband_B > self.fs / 2 * (1 + 1e-12):
            raise ParameterError("passband_B must not exceed fs/2")

    @classmethod
    def for_chirp(cls, cfg, n_samples_M=512, passband_B=None):
        """ADC settings that place exactly ``n_samples_M`` samples in one chirp.

        With ``fs = M / T_c`` one DFT bin equals one range-resolution cell.
        """
        fs = n_samples_M / cfg.T_c
        return cls(passband_B=fs / 2 if passband_B is None else passband_B, fs=fs,
                   n_samples_M=n_samples_M)

    @property
    def bin_width(self):
        return self.fs / self.n_samples_M


class RangePeak(NamedTuple):
    distance: float
    bin: int
    power: float


class RangeEstimate(NamedTuple):
    distance: float
    peak_bin: int
    peak_power: float
    peaks: tuple


def _validate_scene(scene, cfg):
    if scene.target is not None:
        t = scene.target
        check_nonnegative(t.delay_tau, "delay_tau")
        check_nonnegative(t.amp_A1, "amp_A1")
        check_finite(t.phase_theta, "phase_theta")
        if t.delay_tau >= cfg.T_p:
            raise ParameterError("target delay must be < T_p")
    for itf in scene.interferers:
        check_finite(itf.offset_tau_prime, "offset_tau_prime")
        if abs(itf.offset_tau_prime) >= cfg.T_p:
            raise ParameterError("interferer offset must satisfy |tau'| < T_p")
        check_finite(itf.slope_delta, "slope_delta")
        check_nonnegative(itf.amp_A2, "amp_A2")
        check_finite(itf.phase_theta_prime, "phase_theta_prime")
        check_nonnegative(itf.start_t0, "start_t0")
        if not itf.overlap >= 0:
            raise ParameterError("overlap must be >= 0")


def interferer_component(itf, t, slope, passband_B):
    """Gated complex samples of one interferer at times ``t``."""
    dt = t - itf.start_t0
    f_start = slope * itf.offset_tau_prime
    inst_freq = itf.slope_delta * dt + f_start
    phase = itf.phase_theta_prime + 2 * np.pi * (f_start * dt + 0.5 * itf.slope_delta * dt**2)
    active = (dt >= 0) & (dt < itf.overlap) & (np.abs(inst_freq) <= passband_B)
    return np.where(active, itf.amp_A2 * np.exp(1j * phase), 0.0)


def synth_if_output(scene, cfg, ifc):
    """Sampled IF output over one chirp ``[0, T_c)``.

    The target adds the beat tone ``A1 exp(j(2 pi S tau t + theta))``.  Each
    interferer adds a chirped tone, see :class:`Interferer`.  Samples at which
    a component's instantaneous frequency magnitude exceeds ``passband_B`` are
    zeroed for that component only.
    """
    _validate_scene(scene, cfg)
    n = min(ifc.n_samples_M, int(math.ceil(cfg.T_c * ifc.fs - 1e-9)))
    t = np.arange(n) / ifc.fs
    out = np.zeros(n, dtype=complex)

    if scene.target is not None:
        tg = scene.target
        beat = cfg.slope_S * tg.delay_tau
        if abs(beat) <= ifc.passband_B:
            out += tg.amp_A1 * np.exp(1j * (2 * np.pi * beat * t + tg.phase_theta))
    for itf in scene.interferers:
        out += interferer_component(itf, t, cfg.slope_S, ifc.passband_B)
    return SampledSignal(fs=ifc.fs, start_time=0.0, samples=out)


def spectrum(sig, n_fft):
    """Unnormalised DFT of ``sig`` truncated or zero-padded to ``n_fft``."""
    x = np.zeros(n_fft, dtype=complex)
    m = min(n_fft, sig.samples.size)
    x[:m] = sig.samples[:m]
    return np.fft.fft(x)


def estimate_range(sig, cfg, ifc, max_targets=1, rel_threshold=1e-2):
    """Estimate target distance from the strongest positive-frequency bin.

    Returns ``None`` when the signal carries no energy, otherwise a
    :class:`RangeEstimate` whose ``peaks`` lists up to ``max_targets`` local
    spectral maxima (strongest first, ties toward the lower bin).
    """
    M = ifc.n_samples_M
    X = spectrum(sig, M)
    power = np.abs(X[: M // 2] / M) ** 2
    if not np.any(power > 0):
        return None

    def to_distance(k):
        return SPEED_OF_LIGHT * (k * ifc.fs / M) / (2 * cfg.slope_S)

    best = int(np.argmax(power))
    left = np.concatenate(([-np.inf], power[:-1]))
    right = np.concatenate((power[1:], [-np.inf]))
    is_peak = (power >= left) & (power > right) & (power >= rel_threshold * power[best])
    candidates = np.flatnonzero(is_peak)
    # stable sort keeps lower bins first among equal powers
    order = candidates[np.argsort(-power[candidates], kind="stable")]
    peaks = tuple(RangePeak(to_distance(k), int(k), float(power[k]))
                  for k in order[:max_targets])
    return RangeEstimate(to_distance(best), best, float(power[best]), peaks)


def wrap_phase(dphi):
    """Wrap phase differences into ``(-pi, pi]``."""
    return np.pi - np.mod(np.pi - np.asarray(dphi, dtype=float), 2 * np.pi)


def estimate_velocity(chirp_phases, wavelength, T_c):
    """Per-step radial velocity from the peak-bin phases of successive chirps.

    ``v = wavelength * dphi / (4 pi T_c)`` with ``dphi`` wrapped into
    ``(-pi, pi]``.
    """
    phases = np.asarray(chirp_phases, dtype=float)
    if phases.ndim != 1 or phases.size < 2:
        raise DomainError("need at least two chirp phases")
    if not np.all(np.isfinite(phases)):
        raise DomainError("chirp phases must be finite")
    check_positive(wavelength, "wavelength")
    check_positive(T_c, "T_c")
    return wavelength * wrap_phase(np.diff(phases)) / (4 * np.pi * T_c)


def peak_phase(samples, n_fft=None):
    """Angle of the DFT at its strongest bin (all bins considered)."""
    x = np.asarray(samples, dtype=complex)
    X = np.fft.fft(x, n=n_fft)
    k = int(np.argmax(np.abs(X)))
    return float(np.angle(X[k])), k, float(np.abs(X[k]))
