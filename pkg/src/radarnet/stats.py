"""Empirical distributions, an exponential goodness-of-fit test and event episodes."""

import functools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import stats

from ._validation import ParameterError, check_count, check_positive, check_probability

NULL_CHUNK = 64


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    total: int

    def __post_init__(self):
        if np.any(np.diff(self.edges) <= 0):
            raise ParameterError("histogram edges must be strictly increasing")
        if int(self.counts.sum()) != self.total:
            raise ParameterError("histogram counts must sum to total")

    def to_dict(self):
        return {"edges": self.edges.tolist(), "counts": self.counts.tolist(), "total": self.total}


class TestResult(NamedTuple):
    statistic: float
    critical_value: float
    alpha: float
    reject: bool
    mc_reps: int
    p_value: float

    def to_dict(self):
        return {k: (bool(v) if k == "reject" else v) for k, v in self._asdict().items()}


def empirical_distribution(data, n_bins):
    """Uniform-width histogram over ``[min, max]`` and the ECDF points ``(x_(i), i/n)``."""
    x = np.asarray(data, dtype=float).ravel()
    if x.size == 0:
        raise ParameterError("data must be non-empty")
    if not np.all(np.isfinite(x)):
        raise ParameterError("data must be finite")
    n_bins = check_count(n_bins, "n_bins", minimum=1)
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    counts, edges = np.histogram(x, bins=n_bins, range=(lo, hi))
    xs = np.sort(x)
    ecdf = np.column_stack((xs, np.arange(1, xs.size + 1) / xs.size))
    return Histogram(edges, counts, int(x.size)), ecdf


def _ks_exponential(samples):
    """Sup distance between each row's ECDF and its fitted exponential CDF."""
    x = np.sort(samples, axis=-1)
    n = x.shape[-1]
    F = -np.expm1(-x / x.mean(axis=-1, keepdims=True))
    i = np.arange(1, n + 1)
    return np.maximum((i / n - F).max(axis=-1), (F - (i - 1) / n).max(axis=-1))


@functools.lru_cache(maxsize=64)
def _null_statistics(n, mc_reps, seed):
    # the statistic is scale free, so unit-rate draws cover every fitted rate
    rng = np.random.default_rng([seed, n])
    out = np.empty(mc_reps)
    for start in range(0, mc_reps, NULL_CHUNK):
        m = min(NULL_CHUNK, mc_reps - start)
        out[start:start + m] = _ks_exponential(rng.exponential(size=(m, n)))
    out.setflags(write=False)
    return out


def exponential_fit_test(data, alpha=0.05, mc_reps=1000, seed=0):
    """Fit an exponential by maximum likelihood and test the fit.

    The statistic is the Kolmogorov distance to the fitted CDF.  Because the
    rate is estimated from the same data, the critical value comes from
    ``mc_reps`` seeded simulations of the statistic under an exponential
    null of the same size.

    Returns:
        ``(rate, TestResult)`` with ``rate = 1 / mean``.
    """
    x = np.asarray(data, dtype=float).ravel()
    if x.size < 10:
        raise ParameterError("need at least 10 observations")
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise ParameterError("exponential data must be finite and > 0")
    alpha = check_probability(alpha, "alpha", low_open=True, high=0.5)
    mc_reps = check_count(mc_reps, "mc_reps", minimum=1)
    null = _null_statistics(int(x.size), mc_reps, check_count(seed, "seed"))
    statistic = float(_ks_exponential(x))
    crit = float(np.quantile(null, 1 - alpha, method="higher"))
    p = float((np.count_nonzero(null >= statistic) + 1) / (mc_reps + 1))
    return 1.0 / float(x.mean()), TestResult(statistic, crit, alpha, statistic > crit, mc_reps, p)


class Episodes(NamedTuple):
    """Maximal runs of events per (victim, interferer) pair."""

    victim: np.ndarray
    interferer: np.ndarray
    start: np.ndarray
    end: np.ndarray
    n_events: np.ndarray

    @property
    def durations(self):
        return self.end - self.start


def find_episodes(times, victims, interferers, max_gap):
    """Group events into episodes; a gap above ``max_gap`` seconds starts a new one.

    Episodes are returned in order of start time, ties by victim then interferer.
    """
    check_positive(max_gap, "max_gap")
    t = np.asarray(times, dtype=float)
    v = np.asarray(victims, dtype=np.int64)
    j = np.asarray(interferers, dtype=np.int64)
    if t.size == 0:
        z = np.zeros(0)
        zi = np.zeros(0, dtype=np.int64)
        return Episodes(zi, zi, z, z, zi)
    order = np.lexsort((t, j, v))
    t, v, j = t[order], v[order], j[order]
    new = np.ones(t.size, dtype=bool)
    new[1:] = (v[1:] != v[:-1]) | (j[1:] != j[:-1]) | (np.diff(t) > max_gap)
    starts = np.flatnonzero(new)
    ends = np.append(starts[1:], t.size) - 1
    ep = Episodes(v[starts], j[starts], t[starts], t[ends], ends - starts + 1)
    order = np.lexsort((ep.interferer, ep.victim, ep.start))
    return Episodes(*(a[order] for a in ep))


def start_intervals(episodes):
    """Gaps between successive episode starts across the whole network."""
    s = np.sort(episodes.start)
    d = np.diff(s)
    return d[d > 0]


def per_victim_intervals(times, victims):
    """Gaps between successive events seen by the same victim, pooled."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(victims)
    out = []
    for vid in np.unique(v):
        tv = np.sort(t[v == vid])
        d = np.diff(tv)
        out.append(d[d > 0])
    return np.concatenate(out) if out else np.zeros(0)


def stochastically_larger(x, y):
    """One-sided Mann-Whitney test that ``x`` tends to exceed ``y``; returns the p-value."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0 or y.size == 0:
        raise ParameterError("both samples must be non-empty")
    return float(stats.mannwhitneyu(x, y, alternative="greater").pvalue)


def tail_summary(x, quantiles=(0.5, 0.9, 0.99)):
    """Quantiles, mean, and coefficient of variation of a sample."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return {"n": 0}
    mean = float(x.mean())
    return {
        "n": int(x.size),
        "mean": mean,
        "cv": float(x.std() / mean) if mean else float("nan"),
        "quantiles": {f"{q:g}": float(np.quantile(x, q)) for q in quantiles},
    }
