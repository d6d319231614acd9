"""Delay-polynomial algebra and decoupling of superposed radar returns.

A received sequence is a polynomial in the unit delay ``z**-1``.  Known
waveforms divide it: quotient monomials are (amplitude, delay) branches and
whatever no waveform explains ends up in the residue.  Polynomials come in
two coefficient domains: exact rationals for algebraic work and floats with a
pruning tolerance for signal-derived data.
"""

import math
import re
from fractions import Fraction
from numbers import Rational
from typing import NamedTuple

import numpy as np

from ._validation import DomainError, NumericalError, ParameterError, check_nonnegative, check_positive
from .waveform import SPEED_OF_LIGHT


def _to_exact(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (Rational, str)):
        return Fraction(c)
    if isinstance(c, (float, np.floating)):
        if not math.isfinite(c):
            raise ParameterError("coefficients must be finite")
        return Fraction(float(c))
    if isinstance(c, (int, np.integer)):
        return Fraction(int(c))
    raise ParameterError(f"cannot use {c!r} as an exact coefficient")


class DelayPoly:
    """Polynomial ``sum_k c_k z**-k`` with non-negative integer delays ``k``.

    Args:
        coeffs: Mapping from delay exponent to coefficient.
        exact: Store coefficients as :class:`fractions.Fraction`.
        tol: Float mode only; coefficients with ``|c| <= tol`` are dropped.
        max_order: Optional bound on the largest exponent.
    """

    __slots__ = ("_c", "exact", "tol", "max_order")

    def __init__(self, coeffs=None, exact=True, tol=0.0, max_order=None):
        self.exact = bool(exact)
        self.tol = 0.0 if exact else check_nonnegative(tol, "tol")
        self.max_order = max_order
        self._c = {}
        for e, c in (coeffs or {}).items():
            if isinstance(e, bool) or not isinstance(e, (int, np.integer)) or e < 0:
                raise ParameterError(f"delay exponents must be non-negative integers, got {e!r}")
            if max_order is not None and e > max_order:
                raise ParameterError(f"exponent {e} exceeds the order bound {max_order}")
            c = _to_exact(c) if self.exact else complex(c) if isinstance(c, complex) else float(c)
            if not self._is_zero(c):
                self._c[int(e)] = c

    @classmethod
    def from_coeffs(cls, seq, exact=True, tol=0.0):
        """Build from a sequence whose ``k``-th entry multiplies ``z**-k``."""
        return cls(dict(enumerate(seq)), exact=exact, tol=tol)

    @classmethod
    def monomial(cls, coeff, exponent, exact=True):
        return cls({exponent: coeff}, exact=exact)

    def _is_zero(self, c):
        return c == 0 if self.exact else abs(c) <= self.tol

    def _like(self, other=None):
        exact = self.exact and (other is None or other.exact)
        tol = max(self.tol, other.tol if other is not None else 0.0)
        return DelayPoly(exact=exact, tol=tol)

    def _coerce(self, other):
        if isinstance(other, DelayPoly):
            return other
        return DelayPoly({0: other}, exact=self.exact, tol=self.tol)

    @property
    def terms(self):
        """``(exponent, coefficient)`` pairs in increasing delay order."""
        return sorted(self._c.items())

    def coeff(self, exponent):
        return self._c.get(exponent, 0)

    def is_zero(self):
        return not self._c

    def __bool__(self):
        return bool(self._c)

    @property
    def degree(self):
        """Largest delay exponent, ``-1`` for the zero polynomial."""
        return max(self._c) if self._c else -1

    def leading_term(self):
        if not self._c:
            raise DomainError("the zero polynomial has no leading term")
        e = max(self._c)
        return self._c[e], e

    def _set(self, e, c):
        if self._is_zero(c):
            self._c.pop(e, None)
        else:
            self._c[e] = c

    def _convert(self, c):
        return _to_exact(c) if self.exact else c

    def __add__(self, other):
        other = self._coerce(other)
        out = self._like(other)
        for p in (self, other):
            for e, c in p._c.items():
                out._set(e, out._c.get(e, 0) + out._convert(c))
        return out

    __radd__ = __add__

    def __neg__(self):
        out = self._like()
        out._c = {e: -c for e, c in self._c.items()}
        return out

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out = self._like(other)
        for e1, c1 in self._c.items():
            for e2, c2 in other._c.items():
                e = e1 + e2
                out._set(e, out._c.get(e, 0) + out._convert(c1) * out._convert(c2))
        return out

    __rmul__ = __mul__

    def shifted(self, delay, scale=1):
        """``scale * z**-delay * self``."""
        out = self._like()
        scale = out._convert(scale)
        for e, c in self._c.items():
            out._set(e + delay, c * scale)
        return out

    def __eq__(self, other):
        if not isinstance(other, DelayPoly):
            try:
                other = self._coerce(other)
            except ParameterError:
                return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(tuple(self.terms))

    def max_abs_coeff(self):
        return max((abs(c) for c in self._c.values()), default=0)

    def to_array(self, length=None):
        n = self.degree + 1 if length is None else length
        dtype = complex if any(isinstance(c, complex) for c in self._c.values()) else float
        arr = np.zeros(max(n, 0), dtype=dtype)
        for e, c in self._c.items():
            if e < n:
                arr[e] = c
        return arr

    def __str__(self):
        return format_delay_poly(self)

    def __repr__(self):
        mode = "exact" if self.exact else f"float(tol={self.tol:g})"
        return f"DelayPoly({format_delay_poly(self)!r}, {mode})"


def leading_term(p):
    """``(coefficient, exponent)`` of the term with the largest delay."""
    return p.leading_term()


def format_delay_poly(p):
    """Text form ``"c0 + c1 z^-1 + ..."`` in increasing delay order."""
    if p.is_zero():
        return "0"
    parts = []
    for i, (e, c) in enumerate(p.terms):
        neg = (c < 0) if not isinstance(c, complex) else False
        mag = -c if neg else c
        body = str(mag) if e == 0 else f"{mag} z^-{e}"
        if i == 0:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f"{'-' if neg else '+'} {body}")
    return " ".join(parts)


_NUMBER = r"(?:\d+(?:\.\d*)?(?:[eE][+-]?\d+)?(?:/\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
_TERM = re.compile(rf"\s*([+-])?\s*({_NUMBER})?\s*\*?\s*(z\^-(\d+)|z\^\(-(\d+)\))?\s*")


def parse_delay_poly(text, exact=True, tol=0.0):
    """Inverse of :func:`format_delay_poly`.  Round-trips exactly in rational mode."""
    text = text.strip()
    if not text:
        raise ParameterError("empty polynomial text")
    coeffs = {}
    pos = 0
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        sign, number, zpart = m.group(1), m.group(2), m.group(3)
        if m.end() == pos or (number is None and zpart is None):
            raise ParameterError(f"cannot parse polynomial near {text[pos:]!r}")
        if sign is None and not first:
            raise ParameterError(f"missing operator near {text[pos:]!r}")
        exp = int(m.group(4) or m.group(5) or 0) if zpart else 0
        if number is None:
            c = Fraction(1)
        elif exact:
            c = Fraction(number)
        else:
            c = float(Fraction(number)) if "/" in number else float(number)
        if sign == "-":
            c = -c
        coeffs[exp] = coeffs.get(exp, 0) + c
        pos = m.end()
        first = False
    return DelayPoly(coeffs, exact=exact, tol=tol)


class Branch(NamedTuple):
    """One propagation path: amplitude and delay in samples."""

    amplitude: float
    delay: float


class SingleDivision(NamedTuple):
    branches: list
    residue: DelayPoly
    flagged: list


class DecompositionResult(NamedTuple):
    quotients: list
    residue: DelayPoly
    improper: list


class BranchPartition(NamedTuple):
    legitimate: list
    interference: list


def _reduce_once(g, divisor, lt_c, lt_e):
    """Cancel the leading term of ``g`` with a shifted multiple of ``divisor``."""
    c, e = g.leading_term()
    h = c / lt_c
    shift = e - lt_e
    g = g - divisor.shifted(shift, h)
    g._c.pop(e, None)  # float rounding can leave a residual at the cancelled exponent
    return g, h, shift


def divide_single(y, x0, max_delay=None, amp_tol=0.0):
    """Long division of ``y`` by a single known waveform ``x0``.

    Each quotient monomial ``a_j z**-n_j`` becomes a :class:`Branch`.  Quotient
    terms with ``|a_j| < amp_tol`` are folded back into the residue so that
    ``y == x0 * sum(branches) + residue`` still holds.  Delays above
    ``max_delay`` are listed in ``flagged``; division carries on regardless.
    """
    if x0.is_zero():
        raise DomainError("division by the zero polynomial")
    lt_c, lt_e = x0.leading_term()
    g = y + 0  # copy in the combined coefficient domain
    quotient = {}
    residue = g._like(x0)
    while not g.is_zero():
        c, e = g.leading_term()
        if e >= lt_e:
            g, h, shift = _reduce_once(g, x0, lt_c, lt_e)
            quotient[shift] = quotient.get(shift, 0) + h
        else:
            residue._set(e, residue._c.get(e, 0) + c)
            g._c.pop(e)

    branches = []
    for n, a in sorted(quotient.items()):
        if a == 0:
            continue
        if abs(a) < amp_tol:
            residue = residue + x0.shifted(n, a)
        else:
            branches.append(Branch(a, n))
    flagged = [b.delay for b in branches if max_delay is not None and b.delay > max_delay]
    return SingleDivision(branches, residue, flagged)


def divide_multi(y, basis, order_bounds=None):
    """Multivariate-style division of ``y`` by an ordered list of waveforms.

    Repeatedly cancels ``LT(g)`` with the first basis element whose leading
    term divides it, otherwise moves ``LT(g)`` into the residue.  A quotient
    whose degree exceeds its entry in ``order_bounds`` marks that
    decomposition as improper.
    """
    basis = list(basis)
    if not basis:
        raise ParameterError("basis must be non-empty")
    if any(p.is_zero() for p in basis):
        raise DomainError("basis polynomials must be nonzero")
    if order_bounds is not None and len(order_bounds) != len(basis):
        raise ParameterError("order_bounds must match the basis length")
    leads = [p.leading_term() for p in basis]

    g = y + 0
    quotients = [g._like(p) for p in basis]
    residue = g._like()
    while not g.is_zero():
        _, e = g.leading_term()
        for i, (p, (lt_c, lt_e)) in enumerate(zip(basis, leads)):
            if lt_e <= e:
                g, h, shift = _reduce_once(g, p, lt_c, lt_e)
                quotients[i]._set(shift, quotients[i]._c.get(shift, 0) + h)
                break
        else:
            c, e = g.leading_term()
            residue._set(e, residue._c.get(e, 0) + c)
            g._c.pop(e)

    if order_bounds is None:
        improper = [False] * len(basis)
    else:
        improper = [q.degree > bound for q, bound in zip(quotients, order_bounds)]
    return DecompositionResult(quotients, residue, improper)


def classify_branches(branches, max_range, fs):
    """Split branches at the round-trip delay of ``max_range``.

    A delay beyond ``2 * max_range * fs / c`` samples cannot be an own echo
    and is claimed as interference.
    """
    check_positive(fs, "fs")
    check_nonnegative(max_range, "max_range")
    threshold = 2 * max_range * fs / SPEED_OF_LIGHT
    legit, interf = [], []
    for b in branches:
        (interf if b.delay > threshold else legit).append(b)
    return BranchPartition(legit, interf)


def freq_domain_estimate(y, waveform, delay_grid=None, amp_tol=0.05):
    """Estimate branch amplitudes and delays from the channel frequency response.

    ``H = Y / P`` is formed on DFT bins where ``|P|`` exceeds
    ``amp_tol * max|P|`` and transformed back onto ``delay_grid`` (seconds;
    defaults to every sample delay).  Local maxima of ``|h|`` above
    ``amp_tol * max|h|`` become branches; their delays are refined by a
    quadratic fit and rounded to the nearest half sample.
    """
    fs = y.fs
    n_fft = 1 << int(math.ceil(math.log2(max(2, y.samples.size + waveform.samples.size))))
    Y = np.fft.fft(y.samples, n_fft)
    P = np.fft.fft(waveform.samples, n_fft)
    mag = np.abs(P)
    if mag.max() == 0:
        raise NumericalError("waveform has no spectral support")
    valid = mag > amp_tol * mag.max()
    if not np.any(valid):
        raise NumericalError("waveform spectrum below threshold on every bin")
    if not np.any(Y):
        return []

    k = np.arange(n_fft)
    omega = 2 * np.pi * np.where(k < n_fft // 2, k, k - n_fft) / n_fft
    H = Y[valid] / P[valid]
    omega = omega[valid]

    if delay_grid is None:
        grid = np.arange(n_fft, dtype=float)
    else:
        grid = (np.asarray(delay_grid, dtype=float) - (y.start_time - waveform.start_time)) * fs

    def response(d):
        return np.exp(1j * np.outer(np.atleast_1d(d), omega)) @ H / H.size

    h = np.abs(response(grid))
    peak = h.max()
    if peak == 0:
        return []
    branches = []
    for i in range(grid.size):
        left = h[i - 1] if i > 0 else -np.inf
        right = h[i + 1] if i + 1 < grid.size else -np.inf
        if not (h[i] > amp_tol * peak and h[i] >= left and h[i] > right):
            continue
        d = grid[i]
        if 0 < i < grid.size - 1:
            denom = h[i - 1] - 2 * h[i] + h[i + 1]
            if denom < 0:
                step = 0.5 * (grid[i + 1] - grid[i - 1])
                d = grid[i] + 0.5 * (h[i - 1] - h[i + 1]) / denom * step
        d = round(2 * d) / 2
        amp = float(np.abs(response(d))[0])
        branches.append(Branch(amp, d))
    return branches
