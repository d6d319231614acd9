from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from radarnet.multiuser import (
    Branch,
    DelayPoly,
    classify_branches,
    divide_multi,
    divide_single,
    format_delay_poly,
    freq_domain_estimate,
    leading_term,
    parse_delay_poly,
)
from radarnet.report import check_multiuser
from radarnet.waveform import SampledSignal
from radarnet._validation import DomainError, NumericalError

P = parse_delay_poly

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=9)
polys = st.dictionaries(st.integers(0, 12), fractions, max_size=5).map(DelayPoly)
nonzero_polys = polys.filter(lambda p: not p.is_zero())


def test_leading_term_examples():
    assert leading_term(P("4 + 3 z^-1 + 2 z^-2")) == (2, 2)
    assert leading_term(P("5")) == (5, 0)
    assert leading_term(DelayPoly.monomial(7, 9)) == (7, 9)
    with pytest.raises(DomainError):
        leading_term(DelayPoly())


def test_format_and_parse():
    p = DelayPoly({0: 1, 1: -2, 3: Fraction(1, 2)})
    assert format_delay_poly(p) == "1 - 2 z^-1 + 1/2 z^-3"
    assert P("1 - 2 z^-1 + 1/2 z^-3") == p
    assert P("z^-2 + 1") == DelayPoly({0: 1, 2: 1})
    assert format_delay_poly(DelayPoly()) == "0"


@given(polys)
def test_text_round_trip(p):
    assert P(format_delay_poly(p)) == p


def test_two_echo_example():
    x0 = P("1 + 2 z^-1 + z^-2")
    y = P("z^-1 + 1/2 z^-3") * x0
    res = divide_single(y, x0)
    assert res.branches == [Branch(1, 1), Branch(Fraction(1, 2), 3)]
    assert res.residue.is_zero()


def test_identity_quotient():
    x0 = P("1 + 2 z^-1 + z^-2")
    res = divide_single(x0, x0)
    assert res.branches == [Branch(1, 0)] and res.residue.is_zero()


def test_division_by_zero():
    with pytest.raises(DomainError):
        divide_single(P("1"), DelayPoly())


def test_max_delay_flags_but_continues():
    x0 = P("1 + z^-1")
    res = divide_single(x0.shifted(9, 3) + x0, x0, max_delay=5)
    assert res.flagged == [9]
    assert [b.delay for b in res.branches] == [0, 9]


def test_amp_tol_moves_small_branches_to_residue():
    x0 = DelayPoly.from_coeffs([1.0, 0.5], exact=False)
    y = x0.shifted(2, 1.0) + x0.shifted(5, 0.01)
    res = divide_single(y, x0, amp_tol=0.05)
    assert [b.delay for b in res.branches] == [2]
    recon = x0.shifted(2, res.branches[0].amplitude) + res.residue
    assert np.allclose(recon.to_array(8), y.to_array(8))


def test_multi_examples():
    out = divide_multi(P("z^-1 + 1") * P("z^-2 + 1"), [P("z^-2 + 1"), P("z^-1 + 1")])
    assert out.quotients == [P("z^-1 + 1"), DelayPoly()] and out.residue.is_zero()
    out = divide_multi(P("z^-2 + 1"), [P("z^-2")])
    assert out.quotients == [P("1")] and out.residue == P("1")
    out = divide_multi(DelayPoly(), [P("1 + z^-1"), P("z^-3")])
    assert all(q.is_zero() for q in out.quotients) and out.residue.is_zero()


def test_improper_decomposition_flagged():
    p1, p2 = P("1 + z^-1"), P("1 + 2 z^-1")
    inflated = P("z^-4 + z^-6") * p1 + P("3 z^-5") * p2
    assert divide_multi(inflated, [p1, p2], order_bounds=[2, 2]).improper == [True, False]
    assert divide_multi(p1 + p2, [p1, p2], order_bounds=[2, 2]).improper == [False, False]


@given(polys, st.lists(nonzero_polys, min_size=1, max_size=3), st.randoms())
def test_reconstruction_and_normal_form_over_permutations(y, basis, rnd):
    rnd.shuffle(basis)
    out = divide_multi(y, basis)
    recon = sum((q * b for q, b in zip(out.quotients, basis)), DelayPoly()) + out.residue
    assert recon == y
    lead = min(b.leading_term()[1] for b in basis)
    assert all(e < lead for e, _ in out.residue.terms)


@given(nonzero_polys, st.dictionaries(st.integers(0, 64), fractions.filter(bool), min_size=1, max_size=5))
def test_single_division_recovers_branches(x0, branches):
    res = divide_single(x0 * DelayPoly(branches), x0)
    assert res.residue.is_zero()
    assert {b.delay: b.amplitude for b in res.branches} == branches


def test_round_trip_oracle_batch():
    assert check_multiuser(500, seed=5)["passed"]


def test_classify_branches():
    assert classify_branches([], 150.0, 1e7) == ([], [])
    part = classify_branches([Branch(1.0, 0), Branch(0.5, 10), Branch(0.2, 11)], 150.0, 1e7)
    assert [b.delay for b in part.legitimate] == [0, 10]
    assert [b.delay for b in part.interference] == [11]


def _waveform():
    rng = np.random.default_rng(0)
    return SampledSignal(fs=1e6, samples=np.exp(2j * np.pi * rng.random(32)))


def test_freq_domain_single_echo():
    w = _waveform()
    y = SampledSignal(fs=1e6, samples=np.concatenate((np.zeros(8), 2 * w.samples)))
    out = freq_domain_estimate(y, w)
    assert len(out) == 1
    assert abs(out[0].delay - 8) <= 0.5 and out[0].amplitude == pytest.approx(2, rel=0.05)


def test_freq_domain_two_branches():
    w = _waveform()
    y = np.zeros(64, dtype=complex)
    y[5:37] += w.samples
    y[20:52] += 0.5 * w.samples
    out = sorted(freq_domain_estimate(SampledSignal(fs=1e6, samples=y), w), key=lambda b: -b.amplitude)[:2]
    assert abs(out[0].delay - 5) <= 0.5 and out[0].amplitude == pytest.approx(1.0, rel=0.05)
    assert abs(out[1].delay - 20) <= 0.5 and out[1].amplitude == pytest.approx(0.5, rel=0.05)


def test_freq_domain_zero_input_and_null_waveform():
    w = _waveform()
    assert freq_domain_estimate(SampledSignal(fs=1e6, samples=np.zeros(40)), w) == []
    with pytest.raises(NumericalError):
        freq_domain_estimate(SampledSignal(fs=1e6, samples=np.ones(8)), SampledSignal(fs=1e6, samples=np.zeros(8)))
