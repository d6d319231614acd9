"""Interference detection from per-frame spectral features.

Two features are extracted from a frame of four successive chirps: the ratio
of negative- to positive-frequency power in the IF spectrum and the mean
magnitude of the chirp-to-chirp Doppler velocity.  Legitimate echoes sit at
positive beat frequencies with coherent phases; interference leaks into the
negative half and carries unrelated pulse phases.
"""

import math
import warnings
from typing import NamedTuple

import numpy as np
from scipy import optimize
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import ParameterError, check_count, check_interval
from .rx_chain import DechirpScene, Interferer, Target, estimate_velocity, synth_if_output
from .waveform import SPEED_OF_LIGHT

SIGNAL = "signal"
INTERFERENCE = "interference"
CHIRPS_PER_FRAME = 4
POWER_GUARD = 1e-30


class DegenerateInputWarning(UserWarning):
    """Raised as a warning when a frame carries no usable spectral peak."""


class FeatureVector(NamedTuple):
    power_ratio_R: float
    doppler_mag_V: float
    degenerate: bool = False

    def as_array(self):
        return np.array([self.power_ratio_R, self.doppler_mag_V])


def power_ratio(spectrum):
    """Negative-half to positive-half spectral power ratio.

    Bins ``M/2 .. M-1`` hold negative frequencies.  A 2-D input is treated
    as one spectrum per row and the powers are pooled.  An all-zero input
    returns 0 and emits :class:`DegenerateInputWarning`.
    """
    X = np.atleast_2d(np.asarray(spectrum, dtype=complex))
    M = X.shape[-1]
    if M < 4 or M % 2:
        raise ParameterError(f"spectrum length must be even and >= 4, got {M}")
    p = np.abs(X) ** 2
    lower = p[:, : M // 2].sum()
    upper = p[:, M // 2 :].sum()
    if lower == 0 and upper == 0:
        warnings.warn("all-zero spectrum", DegenerateInputWarning, stacklevel=2)
        return 0.0
    return float(upper / (lower + POWER_GUARD))


def _frame_peak_phases(frame):
    X = np.fft.fft(frame, axis=1)
    mag = np.abs(X)
    if not np.all(mag.max(axis=1) > 0):
        return None
    # one common bin for all chirps: the strongest in the pooled spectrum
    k = int(np.argmax((mag**2).sum(axis=0)))
    return np.angle(X[:, k])


def doppler_feature(frame, wavelength, T_c):
    """Mean ``|v|`` over the three successive-chirp velocity estimates of a frame.

    Args:
        frame: ``(4, M)`` complex IF samples, one chirp per row.
        wavelength: Carrier wavelength in m.
        T_c: Chirp duration in s.

    A frame containing an all-zero chirp returns 0 and emits
    :class:`DegenerateInputWarning`.
    """
    frame = np.asarray(frame, dtype=complex)
    if frame.ndim != 2 or frame.shape[0] != CHIRPS_PER_FRAME:
        raise ParameterError(f"frame must have shape (4, M), got {frame.shape}")
    phases = _frame_peak_phases(frame)
    if phases is None:
        warnings.warn("frame contains an all-zero chirp", DegenerateInputWarning, stacklevel=2)
        return 0.0
    return float(np.mean(np.abs(estimate_velocity(phases, wavelength, T_c))))


def frame_features(frame, wavelength, T_c):
    """:class:`FeatureVector` of one frame, flagging degenerate input."""
    frame = np.asarray(frame, dtype=complex)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegenerateInputWarning)
        R = power_ratio(np.fft.fft(frame, axis=1))
        V = doppler_feature(frame, wavelength, T_c)
    degenerate = any(issubclass(w.category, DegenerateInputWarning) for w in caught)
    return FeatureVector(R, V, degenerate)


class SpectralFeatureExtractor(TransformerMixin, BaseEstimator):
    """Maps ``(n, 4, M)`` frame stacks to ``(n, 2)`` feature matrices."""

    def __init__(self, wavelength=SPEED_OF_LIGHT / 77e9, T_c=60e-6):
        self.wavelength = wavelength
        self.T_c = T_c

    def fit(self, X=None, y=None):
        return self

    def transform(self, X):
        frames = np.asarray(X, dtype=complex)
        if frames.ndim != 3:
            raise ParameterError("expected an array of shape (n_frames, 4, M)")
        return np.array([frame_features(f, self.wavelength, self.T_c)[:2] for f in frames])


class LabeledDataset(NamedTuple):
    features: np.ndarray
    labels: np.ndarray
    seed: int
    snr_range: tuple = (math.nan, math.nan)


def _awgn(rng, shape, power):
    return math.sqrt(power / 2) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _signal_frame(rng, cfg, ifc, snr_db):
    # beat kept well inside the positive half of the spectrum
    f_beat = rng.uniform(0.05, 0.45) * ifc.fs
    tau = f_beat / cfg.slope_S
    v = rng.uniform(-1.5, 1.5)
    step = 4 * math.pi * v * cfg.T_c / cfg.wavelength
    theta0 = rng.uniform(0, 2 * math.pi)
    rows = [synth_if_output(DechirpScene(target=Target(tau, 1.0, theta0 + m * step)), cfg, ifc).samples
            for m in range(CHIRPS_PER_FRAME)]
    frame = np.array(rows)
    return frame + _awgn(rng, frame.shape, 10 ** (-snr_db / 10))


def _interference_frame(rng, cfg, ifc, snr_db):
    f_beat = rng.uniform(0.05, 0.45) * ifc.fs
    lead = rng.random() < 0.5
    offset = (-1 if lead else 1) * f_beat / cfg.slope_S
    rows = []
    for _ in range(CHIRPS_PER_FRAME):
        itf = Interferer(offset, 0.0, 1.0, rng.uniform(0, 2 * math.pi))
        rows.append(synth_if_output(DechirpScene(interferers=(itf,)), cfg, ifc).samples)
    frame = np.array(rows)
    return frame + _awgn(rng, frame.shape, 10 ** (-snr_db / 10))


def gen_synthetic_dataset(n_per_class, snr_range, cfg, ifc, seed, return_frames=False):
    """Labeled features for coherent-target frames and interference frames.

    Signal frames hold one target with a random range and a small radial
    velocity.  Interference frames hold an equal-slope interferer that leads
    or lags the local chirp at random, with an independent phase on every
    chirp.  Both get complex white noise at an SNR drawn uniformly from
    ``snr_range`` (dB, per sample).  Signal rows come first.
    """
    n_per_class = check_count(n_per_class, "n_per_class", minimum=1)
    lo, hi = check_interval(snr_range, "snr_range")
    rng = np.random.default_rng(seed)
    frames, labels = [], []
    for label, maker in ((SIGNAL, _signal_frame), (INTERFERENCE, _interference_frame)):
        for _ in range(n_per_class):
            frames.append(maker(rng, cfg, ifc, rng.uniform(lo, hi)))
            labels.append(label)
    feats = np.array([frame_features(f, cfg.wavelength, cfg.T_c)[:2] for f in frames])
    data = LabeledDataset(feats, np.array(labels), seed, (lo, hi))
    return (data, np.array(frames)) if return_frames else data


def save_dataset(data, path):
    with open(path, "w", newline="") as fh:
        fh.write(f"# seed={data.seed} snr_lo={float(data.snr_range[0])!r} snr_hi={float(data.snr_range[1])!r}\n")
        fh.write("label,power_ratio,doppler_mag\n")
        for label, (r, v) in zip(data.labels.tolist(), np.asarray(data.features, dtype=float).tolist()):
            fh.write(f"{label},{r!r},{v!r}\n")


def load_dataset(path):
    meta = {}
    labels, feats = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for item in line[1:].split():
                    key, _, val = item.partition("=")
                    meta[key] = val
                continue
            if line.startswith("label,"):
                continue
            try:
                label, r, v = line.split(",")
                row = (float(r), float(v))
            except ValueError:
                raise ParameterError(f"malformed dataset row {line!r}") from None
            if label not in (SIGNAL, INTERFERENCE):
                raise ParameterError(f"unknown label {label!r}")
            labels.append(label)
            feats.append(row)
    seed = int(meta["seed"]) if meta.get("seed", "None") != "None" else None
    snr = (float(meta.get("snr_lo", "nan")), float(meta.get("snr_hi", "nan")))
    return LabeledDataset(np.array(feats).reshape(-1, 2), np.array(labels), seed, snr)


class LinearClassifier(ClassifierMixin, BaseEstimator):
    """Linear max-margin classifier on standardized features.

    Minimizes ``alpha/2 |w|^2 + mean(max(0, 1 - y (w.x + b))**2)`` over the
    full batch with L-BFGS, which is deterministic and independent of the
    sample order.  ``signal`` is the positive class; a zero decision value
    is reported as ``interference``.
    """

    def __init__(self, alpha=1e-4, max_iter=1000, tol=1e-10):
        self.alpha = alpha
        self.max_iter = max_iter
        self.tol = tol

    @staticmethod
    def _signs(y):
        y = np.asarray(y)
        bad = ~np.isin(y, (SIGNAL, INTERFERENCE))
        if np.any(bad):
            raise ParameterError(f"labels must be {SIGNAL!r} or {INTERFERENCE!r}")
        return np.where(y == SIGNAL, 1.0, -1.0)

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or not np.all(np.isfinite(X)):
            raise ParameterError("features must be a finite 2-D array")
        s = self._signs(y)
        if np.unique(s).size < 2:
            raise ParameterError("training data must contain both classes")
        self.feature_means_ = X.mean(axis=0)
        scales = X.std(axis=0)
        self.feature_scales_ = np.where(scales > 0, scales, 1.0)
        Z = (X - self.feature_means_) / self.feature_scales_
        n, d = Z.shape
        alpha = self.alpha

        def objective(theta):
            w, b = theta[:d], theta[d]
            margin = 1 - s * (Z @ w + b)
            active = np.maximum(margin, 0)
            loss = 0.5 * alpha * w @ w + active @ active / n
            g = -2 * (active * s) / n
            return loss, np.concatenate((alpha * w + Z.T @ g, [g.sum()]))

        res = optimize.minimize(objective, np.zeros(d + 1), jac=True, method="L-BFGS-B",
                                options={"maxiter": self.max_iter, "gtol": self.tol, "ftol": 1e-15})
        self.coef_ = res.x[:d]
        self.intercept_ = float(res.x[d])
        self.classes_ = np.array([INTERFERENCE, SIGNAL])
        self.n_iter_ = int(res.nit)
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = np.asarray(X, dtype=float)
        if not np.all(np.isfinite(X)):
            raise ParameterError("features must be finite")
        return ((X - self.feature_means_) / self.feature_scales_) @ self.coef_ + self.intercept_

    def predict(self, X):
        return np.where(self.decision_function(np.atleast_2d(X)) > 0, SIGNAL, INTERFERENCE)


def train_classifier(data, **params):
    """Fit a :class:`LinearClassifier` on a :class:`LabeledDataset`."""
    return LinearClassifier(**params).fit(data.features, data.labels)


def classify(clf, x):
    """Label one feature vector as ``"signal"`` or ``"interference"``."""
    arr = np.asarray(x[:2] if isinstance(x, FeatureVector) else x, dtype=float).reshape(1, -1)
    return str(clf.predict(arr)[0])
