"""Input validation helpers shared by the public API."""

import math
import numbers

import numpy as np


class ParameterError(ValueError):
    """Raised when a parameter violates a documented invariant."""


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


class NumericalError(RuntimeError):
    """Raised when a numerical routine fails to converge."""


def check_finite(value, name):
    if not isinstance(value, numbers.Real) or not math.isfinite(value):
        raise ParameterError(f"{name} must be a finite real number, got {value!r}")
    return float(value)


def check_positive(value, name):
    value = check_finite(value, name)
    if value <= 0:
        raise ParameterError(f"{name} must be > 0, got {value!r}")
    return value


def check_nonnegative(value, name):
    value = check_finite(value, name)
    if value < 0:
        raise ParameterError(f"{name} must be >= 0, got {value!r}")
    return value


def check_count(value, name, minimum=0):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {value!r}")
    return int(value)


def check_probability(value, name, low_open=False, high=1.0):
    value = check_finite(value, name)
    if value > high or value < 0 or (low_open and value == 0):
        raise ParameterError(f"{name} must lie in {'(' if low_open else '['}0, {high}], got {value!r}")
    return value


def check_interval(interval, name, nonnegative=False):
    """Return ``(lo, hi)`` as floats, requiring ``lo <= hi``."""
    try:
        lo, hi = interval
    except (TypeError, ValueError):
        raise ParameterError(f"{name} must be a (low, high) pair, got {interval!r}") from None
    lo = check_finite(lo, f"{name}[0]")
    hi = check_finite(hi, f"{name}[1]")
    if lo > hi:
        raise ParameterError(f"{name} is empty: {lo} > {hi}")
    if nonnegative and lo < 0:
        raise ParameterError(f"{name} lower bound must be >= 0, got {lo}")
    return lo, hi


def as_complex_array(samples, name="samples"):
    arr = np.asarray(samples, dtype=complex)
    if arr.ndim != 1:
        raise ParameterError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} must contain only finite values")
    return arr


def is_power_of_two(n):
    return n > 0 and (n & (n - 1)) == 0
