import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thurston import random_model as rm
from thurston.errors import InputError

P = rm.ModelParams


def naive_prob(p):
    """Outcome-by-outcome enumeration with plain Python loops."""
    n, m, k = p.n, p.m, p.k
    bad = total = 0
    for entries in itertools.product(range(k), repeat=n * m):
        I = [entries[i * m : (i + 1) * m] for i in range(n)]
        rows = [sum(r) for r in I]
        cols = [sum(I[i][j] for i in range(n)) for j in range(m)]
        for mults in itertools.product(range(1, k + 1), repeat=n + m):
            total += 1
            if any(mults[i] * rows[i] == 1 for i in range(n)) or any(mults[n + j] * cols[j] == 1 for j in range(m)):
                bad += 1
    return Fraction(bad, total)


def test_exact_bound_examples():
    assert rm.exact_bound(P(1, 1, 4)) == 0.125
    assert rm.exact_bound(P(1, 1, 2)) == 0.5
    assert rm.exact_bound(P(2, 3, 10**6)) < 1e-10


def test_bad_event_exact_examples():
    assert rm.bad_event_prob_exact(P(1, 1, 4)) == Fraction(7, 64)
    assert rm.bad_event_prob_exact(P(1, 1, 2)) == Fraction(3, 8)


def test_brute_force_examples():
    assert rm.brute_force_prob(P(1, 1, 4)) == Fraction(7, 64)
    assert rm.brute_force_prob(P(1, 1, 2)) == Fraction(3, 8)
    assert rm.brute_force_prob(P(1, 2, 2)) <= rm.exact_bound(P(1, 2, 2))


@pytest.mark.parametrize("n, m, k", [(1, 1, 3), (1, 2, 2), (2, 1, 3), (2, 2, 2), (1, 3, 2), (2, 2, 3)])
def test_brute_force_matches_naive_enumeration(n, m, k):
    assert rm.brute_force_prob(P(n, m, k)) == naive_prob(P(n, m, k))


@pytest.mark.parametrize("k", range(2, 12))
def test_exact_equals_brute_force_for_single_curves(k):
    p = P(1, 1, k)
    assert rm.bad_event_prob_exact(p) == rm.brute_force_prob(p)
    assert abs(float(rm.bad_event_prob_exact(p)) - float(rm.brute_force_prob(p))) <= 1e-15


def test_bound_dominates_every_enumerable_case():
    for n, m in itertools.product(range(1, 4), repeat=2):
        for k in range(2, 8):
            p = P(n, m, k)
            assert float(rm.bad_event_prob_exact(p)) <= rm.exact_bound(p) + 1e-12
            if k ** (n * m + n + m) <= 10**6:
                assert rm.brute_force_prob(p) <= Fraction(rm.exact_bound(p))


def test_enumeration_guard():
    with pytest.raises(rm.TooLargeToEnumerate):
        rm.brute_force_prob(P(3, 3, 4))


@settings(max_examples=50)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(2, 30))
def test_exact_bound_decreasing_in_k(n, m, k):
    assert rm.exact_bound(P(n, m, k + 1)) <= rm.exact_bound(P(n, m, k))


def test_params_validation():
    with pytest.raises(InputError):
        P(0, 1, 4)
    with pytest.raises(InputError):
        P(1, 1, 1)
    with pytest.raises(InputError):
        rm.mc_estimate(P(1, 1, 4), 0, 1)


def test_sample_model_ranges():
    rng = np.random.default_rng(0)
    for _ in range(200):
        s = rm.sample_model(P(2, 3, 4), rng)
        assert s.intersections.shape == (2, 3)
        assert s.intersections.min() >= 0 and s.intersections.max() <= 3
        assert 1 <= s.row_mult.min() and s.row_mult.max() <= 4
        assert 1 <= s.col_mult.min() and s.col_mult.max() <= 4


def test_sample_model_bad_event_frequency():
    rng = np.random.default_rng(1)
    p = P(1, 1, 2)
    hits = sum(rm.sample_model(p, rng).is_bad() for _ in range(20_000))
    assert abs(hits / 20_000 - 3 / 8) < 5 * np.sqrt(3 / 8 * 5 / 8 / 20_000)


def test_mc_single_trial():
    assert rm.mc_estimate(P(1, 1, 4), 1, 3).estimate in (0.0, 1.0)


def test_mc_is_deterministic_and_thread_independent():
    p = P(2, 2, 3)
    a = rm.mc_estimate(p, 450_000, 7)
    assert a == rm.mc_estimate(p, 450_000, 7)
    assert a == rm.mc_estimate(p, 450_000, 7, threads=3)


@pytest.mark.parametrize("n, m, k", [(1, 1, 4), (1, 2, 2), (2, 2, 3)])
def test_mc_converges_to_enumeration(n, m, k):
    p = P(n, m, k)
    mc = rm.mc_estimate(p, 10**6, 2024)
    exact = float(rm.brute_force_prob(p))
    assert abs(mc.estimate - exact) <= 4 * mc.std_error
    assert mc.estimate <= rm.exact_bound(p) + 3 * mc.std_error


def test_model_report():
    r = rm.model_report(P(1, 1, 4), 1000, 5)
    assert r["exact_bound"] == 0.125 and r["exact_prob"] == 0.109375
    assert {"mc_estimate", "mc_std_error", "trials", "seed"} <= set(r)
    assert "exact_prob" not in rm.model_report(P(3, 3, 4))
    with pytest.raises(InputError):
        rm.model_report(P(1, 1, 4), 10, None)
