import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps
from statsmodels.stats.diagnostic import lilliefors

from radarnet.stats import (
    Histogram,
    empirical_distribution,
    exponential_fit_test,
    find_episodes,
    per_victim_intervals,
    start_intervals,
    stochastically_larger,
    tail_summary,
)
from radarnet._validation import ParameterError


def test_histogram_examples():
    hist, ecdf = empirical_distribution([1, 2, 3, 4], 2)
    assert hist.counts.tolist() == [2, 2] and hist.total == 4
    assert ecdf[-1, 1] == 1.0


def test_histogram_invariants_enforced():
    with pytest.raises(ParameterError):
        Histogram(np.array([0.0, 1.0, 1.0]), np.array([1, 1]), 2)
    with pytest.raises(ParameterError):
        Histogram(np.array([0.0, 1.0]), np.array([1]), 2)


def test_exponential_bin_masses():
    x = np.random.default_rng(0).exponential(size=10**5)
    hist, _ = empirical_distribution(x, 20)
    p = np.diff(sps.expon.cdf(hist.edges))
    p = p / p.sum()
    sigma = np.sqrt(x.size * p * (1 - p))
    assert np.all(np.abs(hist.counts - x.size * p) <= 3 * sigma + 1)


def test_rate_is_inverse_mean():
    data = np.random.default_rng(1).exponential(2.0, 50)
    data = data * 2.0 / data.mean()
    rate, _ = exponential_fit_test(data, mc_reps=200)
    assert rate == pytest.approx(0.5)


def test_statistic_matches_statsmodels():
    x = np.random.default_rng(2).exponential(3.0, 500)
    _, res = exponential_fit_test(x, mc_reps=200)
    ks, _ = lilliefors(x, dist="exp", pvalmethod="table")
    assert res.statistic == pytest.approx(ks, rel=1e-12)


def test_decisions_agree_with_statsmodels_on_clear_cases():
    rng = np.random.default_rng(3)
    for x, expect in ((rng.exponential(size=2000), False), (rng.uniform(size=2000), True)):
        _, res = exponential_fit_test(x)
        _, p = lilliefors(x, dist="exp", pvalmethod="table")
        assert res.reject == expect == (p < 0.05)


def test_size_on_large_samples():
    accepted = sum(not exponential_fit_test(np.random.default_rng(s).exponential(size=10**4))[1].reject
                   for s in range(100))
    assert accepted >= 93


def test_power_against_uniform():
    assert exponential_fit_test(np.random.default_rng(0).uniform(size=10**4))[1].reject


def test_rejection_rate_near_alpha():
    n_seeds, alpha = 200, 0.05
    rejects = sum(exponential_fit_test(np.random.default_rng(1000 + s).exponential(size=200), alpha)[1].reject
                  for s in range(n_seeds))
    assert abs(rejects - alpha * n_seeds) <= 3 * np.sqrt(n_seeds * alpha * (1 - alpha))


def test_test_is_deterministic_per_seed():
    x = np.random.default_rng(5).exponential(size=100)
    assert exponential_fit_test(x, seed=4) == exponential_fit_test(x, seed=4)


@pytest.mark.parametrize("bad", [[1.0] * 9, [0.0] + [1.0] * 10, [np.nan] + [1.0] * 10])
def test_fit_input_checks(bad):
    with pytest.raises(ParameterError):
        exponential_fit_test(bad)


def test_find_episodes():
    t = [0.0, 0.5, 3.0, 0.2, 10.0]
    v = [1, 1, 1, 2, 1]
    j = [2, 2, 2, 1, 2]
    ep = find_episodes(t, v, j, max_gap=1.0)
    assert ep.start.tolist() == [0.0, 0.2, 3.0, 10.0]
    assert ep.n_events.tolist() == [2, 1, 1, 1]
    assert start_intervals(ep) == pytest.approx([0.2, 2.8, 7.0])


@settings(max_examples=50)
@given(st.lists(st.tuples(st.floats(0, 100), st.integers(0, 4), st.integers(0, 4)), max_size=60),
       st.floats(0.1, 10))
def test_episodes_cover_all_events(events, gap):
    t = [e[0] for e in events]
    ep = find_episodes(t, [e[1] for e in events], [e[2] for e in events], gap)
    assert int(ep.n_events.sum()) == len(events)
    assert np.all(ep.durations >= 0)
    assert np.all(np.diff(ep.start) >= 0)


def test_per_victim_intervals():
    d = per_victim_intervals([0, 1, 3, 0.5, 2.5], [1, 1, 1, 2, 2])
    assert sorted(d.tolist()) == [1.0, 2.0, 2.0]


def test_stochastically_larger():
    rng = np.random.default_rng(0)
    assert stochastically_larger(rng.exponential(2, 300), rng.exponential(1, 300)) < 0.01
    assert stochastically_larger(rng.exponential(1, 300), rng.exponential(2, 300)) > 0.5


def test_tail_summary():
    s = tail_summary([1.0, 1.0, 1.0])
    assert s["n"] == 3 and s["cv"] == 0.0 and s["quantiles"]["0.5"] == 1.0
    assert tail_summary([]) == {"n": 0}
