"""Interference predicates, closed-form probability results and their oracles.

The Monte-Carlo experiment reproduces the stochastic-geometry model directly
(Poisson transmitters in a disk of radius ``2 d_s``, each illuminating a
reflector uniformly placed in its own ``d_s`` disk) so that the closed forms
can be checked against simulation rather than against each other.
"""

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate, stats

from ._validation import (
    NumericalError,
    ParameterError,
    check_count,
    check_nonnegative,
    check_positive,
)
from .waveform import SPEED_OF_LIGHT

MC_BLOCK_SIZE = 4096


class InterferenceStage(enum.Enum):
    RF = "RF"
    IF = "IF"
    DECISION = "Decision"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class TimingModel:
    T_p: float
    T_min: float

    def __post_init__(self):
        check_positive(self.T_p, "T_p")
        check_positive(self.T_min, "T_min")
        if self.T_min >= self.T_p:
            raise ParameterError("T_min must be < T_p")

    @property
    def window_ratio(self):
        """Fraction ``(T_p - T_min) / T_p`` of a period in which arrivals interfere."""
        return (self.T_p - self.T_min) / self.T_p

    @classmethod
    def from_chirp(cls, cfg):
        return cls(T_p=cfg.T_p, T_min=cfg.T_min)


@dataclass(frozen=True)
class NetworkGeometry:
    density_lambda: float
    d_s: float

    def __post_init__(self):
        check_nonnegative(self.density_lambda, "density_lambda")
        check_positive(self.d_s, "d_s")


@dataclass(frozen=True)
class MCReport:
    trials: int
    hit_fraction: float
    mean_interferer_count: float
    uniformity_p_value: float
    seed: int
    n_arrivals: int = 0


class LensCheck(NamedTuple):
    value: float
    matches_paper: bool


def is_interfered(tau_i, tau_j, tau_ji, tm):
    """Whether radar ``i`` is interfered by radar ``j``.

    True iff some integer ``k`` satisfies
    ``0 <= tau_j + k*T_p + tau_ji - tau_i <= T_p - T_min``, evaluated as
    ``ceil(lower) <= floor(upper)``.  Works elementwise on arrays.
    """
    x = np.asarray(tau_i, dtype=float) - np.asarray(tau_j, dtype=float) - np.asarray(tau_ji, dtype=float)
    if np.any(np.asarray(tau_ji) < 0):
        raise ParameterError("tau_ji must be >= 0")
    if not np.all(np.isfinite(x)):
        raise ParameterError("timing offsets must be finite")
    lower = x / tm.T_p
    upper = (tm.T_p - tm.T_min + x) / tm.T_p
    hit = np.ceil(lower) <= np.floor(upper)
    return bool(hit) if hit.ndim == 0 else hit


def is_interfered_floor_form(tau_i, tau_j, tau_ji, tm):
    """The floor-difference form of the same test.

    Misses the measure-zero case where the lower endpoint is an integer; kept
    only so the discrepancy can be reported.
    """
    x = np.asarray(tau_i, dtype=float) - np.asarray(tau_j, dtype=float) - np.asarray(tau_ji, dtype=float)
    hit = np.floor((tm.T_p - tm.T_min + x) / tm.T_p) - np.floor(x / tm.T_p) == 1
    return bool(hit) if hit.ndim == 0 else hit


def prob_bound_single(N, tm):
    """Union bound ``(N-1)(T_p - T_min)/T_p`` clipped to ``[0, 1]``."""
    N = check_count(N, "N", minimum=1)
    return float(min(1.0, max(0.0, (N - 1) * tm.window_ratio)))


def prob_bound_poisson(geo, tm):
    """Upper bound ``1 - exp(-ratio * lambda * pi * d_s**2)`` on the interference probability."""
    return float(-math.expm1(-tm.window_ratio * geo.density_lambda * math.pi * geo.d_s**2))


def expected_count(geo, tm):
    """Closed-form expected number of interferers, ``lambda d_s**2 ratio / 2``."""
    return 0.5 * geo.density_lambda * geo.d_s**2 * tm.window_ratio


class MCPartial(NamedTuple):
    """Per-block Monte-Carlo tallies; merge with :func:`merge_partials`."""

    block_index: tuple
    n_trials: tuple
    n_hit: tuple
    n_interferers: tuple
    phases: tuple


def _block_sizes(trials):
    n_blocks = -(-trials // MC_BLOCK_SIZE)
    sizes = [MC_BLOCK_SIZE] * n_blocks
    if n_blocks:
        sizes[-1] = trials - MC_BLOCK_SIZE * (n_blocks - 1)
    return sizes


def _mc_block(geo, tm, seed, block_index, n):
    rng = np.random.default_rng([seed, block_index])
    d = geo.d_s
    m = rng.poisson(geo.density_lambda * math.pi * (2 * d) ** 2, size=n)
    total = int(m.sum())
    trial = np.repeat(np.arange(n), m)

    r_tx = 2 * d * np.sqrt(rng.random(total))
    a_tx = 2 * np.pi * rng.random(total)
    tx = np.column_stack((r_tx * np.cos(a_tx), r_tx * np.sin(a_tx)))
    r_rf = d * np.sqrt(rng.random(total))
    a_rf = 2 * np.pi * rng.random(total)
    refl = tx + np.column_stack((r_rf * np.cos(a_rf), r_rf * np.sin(a_rf)))
    tau_j = tm.T_p * rng.random(total)

    dist_victim = np.hypot(refl[:, 0], refl[:, 1])
    reaches = dist_victim <= d
    tau_ji = (r_rf + dist_victim) / SPEED_OF_LIGHT
    timing = is_interfered(np.zeros(total), tau_j, tau_ji, tm)
    hits = reaches & timing

    counts = np.bincount(trial[hits], minlength=n)
    phases = np.mod(tau_j[reaches] + tau_ji[reaches], tm.T_p) / tm.T_p
    return int(np.count_nonzero(counts)), int(counts.sum()), phases


def mc_partial(geo, tm, trials, seed, block_indices=None):
    """Run a subset of the fixed-size trial blocks of an experiment.

    Trials are grouped in blocks of :data:`MC_BLOCK_SIZE`; block ``b`` is
    seeded by ``(seed, b)``, so any partition of the blocks across workers
    merges to the same report.
    """
    trials = check_count(trials, "trials", minimum=1)
    seed = check_count(seed, "seed")
    sizes = _block_sizes(trials)
    if block_indices is None:
        block_indices = range(len(sizes))
    out = ([], [], [], [], [])
    for b in block_indices:
        if not 0 <= b < len(sizes):
            raise ParameterError(f"block index {b} out of range")
        n_hit, n_int, phases = _mc_block(geo, tm, seed, b, sizes[b])
        for acc, val in zip(out, (b, sizes[b], n_hit, n_int, phases)):
            acc.append(val)
    return MCPartial(*(tuple(acc) for acc in out))


def merge_partials(parts, seed):
    blocks = {}
    for part in parts:
        for b, n, h, k, ph in zip(*part):
            if b in blocks:
                raise ParameterError(f"block {b} appears in more than one partial")
            blocks[b] = (n, h, k, ph)
    order = sorted(blocks)
    if order != list(range(len(order))):
        raise ParameterError("partials do not cover a contiguous set of blocks")
    trials = sum(blocks[b][0] for b in order)
    hits = sum(blocks[b][1] for b in order)
    interferers = sum(blocks[b][2] for b in order)
    phases = np.concatenate([blocks[b][3] for b in order]) if order else np.zeros(0)
    p_value = float(stats.kstest(phases, "uniform").pvalue) if phases.size else 1.0
    return MCReport(
        trials=trials,
        hit_fraction=hits / trials,
        mean_interferer_count=interferers / trials,
        uniformity_p_value=p_value,
        seed=seed,
        n_arrivals=int(phases.size),
    )


def mc_experiment(geo, tm, trials, seed):
    """Monte-Carlo estimate of the interference probability and mean count.

    Each trial draws ``Poisson(lambda * pi * (2 d_s)**2)`` transmitters in the
    ``2 d_s`` disk around the victim.  A transmitter's reflector is uniform in
    its own ``d_s`` disk; it interferes when the reflector is within ``d_s``
    of the victim and a uniformly phased pulse passes :func:`is_interfered`.
    The report's p-value tests the arrival phases of all pulses reaching the
    victim for uniformity.
    """
    trials = check_count(trials, "trials", minimum=1)
    return merge_partials([mc_partial(geo, tm, trials, seed)], seed)


def lens_integrand(r, d_s=1.0):
    """Integrand of the mean-count derivation, as written (half lens term)."""
    r = np.asarray(r, dtype=float)
    arg = np.clip(r / (2 * d_s), -1.0, 1.0)
    root = np.sqrt(np.clip(d_s**2 - r**2 / 4, 0.0, None))
    return (2 * d_s**2 * np.arccos(arg) - 0.5 * r * root) * r / (math.pi * d_s**2) ** 2


# Integral of the expression above in closed form (independent of d_s).
LENS_INTEGRAL_AS_WRITTEN = 3 / (4 * math.pi)
LENS_INTEGRAL_CLAIMED = 1 / (4 * math.pi)


def lens_integral_check(rel_tol=1e-10, d_s=1.0, max_subdivisions=200):
    """Adaptive quadrature of the lens integral over ``[0, 2 d_s]``.

    ``matches_paper`` compares the converged value with ``1/(4 pi)`` at an
    absolute tolerance of 1e-6.
    """
    check_positive(rel_tol, "rel_tol")
    check_positive(d_s, "d_s")
    value, abserr, info = integrate.quad(
        lens_integrand, 0.0, 2 * d_s, args=(d_s,), epsabs=0.0, epsrel=rel_tol,
        limit=max_subdivisions, full_output=True,
    )[:3]
    if abserr > rel_tol * abs(value) or info.get("last", 0) >= max_subdivisions:
        raise NumericalError(f"quadrature did not converge (abserr={abserr:g})")
    return LensCheck(float(value), abs(value - LENS_INTEGRAL_CLAIMED) <= 1e-6)


def simpson_lens_integral(d_s=1.0, n_points=10**6 + 1):
    """Fixed-step composite Simpson rule for the same integral."""
    if n_points % 2 == 0:
        n_points += 1
    r, h = np.linspace(0.0, 2 * d_s, n_points, retstep=True)
    f = lens_integrand(r, d_s)
    return float(h / 3 * (f[0] + f[-1] + 4 * f[1:-1:2].sum() + 2 * f[2:-1:2].sum()))
