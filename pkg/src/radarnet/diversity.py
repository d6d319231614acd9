"""Time- and slope-diversity parameter assignment and duration gating."""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import ParameterError, check_count, check_nonnegative, check_positive
from .interference import InterferenceStage


@dataclass(frozen=True)
class DiversityPolicy:
    """Randomisation of pulse periods and chirp slopes across radars.

    Attributes:
        period_spread: ``(low, high)`` multiplicative range for pulse periods.
        slope_sigma: Relative standard deviation of the chirp slope.
        duration_gate: IF interference shorter than this fraction of ``T_c``
            is rejected before the decision stage.
    """

    period_spread: tuple = (0.9, 1.1)
    slope_sigma: float = 0.0
    duration_gate: float = 0.8

    def __post_init__(self):
        lo, hi = self.period_spread
        check_positive(lo, "period_spread low")
        check_positive(hi, "period_spread high")
        if lo > hi:
            raise ParameterError("period_spread low must be <= high")
        object.__setattr__(self, "period_spread", (float(lo), float(hi)))
        check_nonnegative(self.slope_sigma, "slope_sigma")
        check_positive(self.duration_gate, "duration_gate")
        if self.duration_gate > 1:
            raise ParameterError("duration_gate must be <= 1")

    @classmethod
    def none(cls):
        """Identical periods and slopes for every radar."""
        return cls(period_spread=(1.0, 1.0), slope_sigma=0.0)


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def assign_periods(n, base_T_p, policy, seed):
    """Draw ``n`` pulse periods uniformly on ``[low * base, high * base]``."""
    n = check_count(n, "n", minimum=1)
    base_T_p = check_positive(base_T_p, "base_T_p")
    lo, hi = policy.period_spread
    u = _rng(seed).random(n)
    return base_T_p * (lo + (hi - lo) * u)


def assign_slopes(n, base_S, policy, seed):
    """Draw ``n`` slopes uniformly with relative standard deviation ``slope_sigma``.

    The half-width of the uniform range is ``sigma * sqrt(3)`` times the base
    slope, which must stay below 1 so every slope is positive.
    """
    n = check_count(n, "n", minimum=1)
    base_S = check_positive(base_S, "base_S")
    half = policy.slope_sigma * math.sqrt(3)
    if half >= 1:
        raise ParameterError(f"slope_sigma={policy.slope_sigma} allows non-positive slopes")
    u = _rng(seed).random(n)
    return base_S * (1 + half * (2 * u - 1))


def if_interference_duration(delta_S, passband_B, overlap):
    """Time an interfering beat stays inside the IF passband.

    With equal slopes the beat is constant and the whole ``overlap`` passes;
    otherwise the beat sweeps the two-sided passband at rate ``|delta_S|``.
    """
    check_positive(passband_B, "passband_B")
    overlap = check_nonnegative(overlap, "overlap")
    if delta_S == 0:
        return overlap
    return min(overlap, 2 * passband_B / abs(delta_S))


def if_interference_duration_array(delta_S, passband_B, overlap):
    """Vectorised :func:`if_interference_duration`."""
    delta_S = np.abs(np.asarray(delta_S, dtype=float))
    overlap = np.asarray(overlap, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        sweep = np.where(delta_S > 0, 2 * passband_B / delta_S, np.inf)
    return np.minimum(overlap, sweep)


def gate_by_duration(duration, T_c, policy):
    """IF stage if shorter than ``duration_gate * T_c``, else Decision (boundary passes)."""
    check_nonnegative(duration, "duration")
    check_positive(T_c, "T_c")
    if duration < policy.duration_gate * T_c:
        return InterferenceStage.IF
    return InterferenceStage.DECISION
