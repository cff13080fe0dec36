"""Maximal p-sums, p-variations and the Love-Young type inequalities."""
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frontrack.errors import ConditionError, GuardError, InvalidInputError
from frontrack.model import builtin_p_system, rarefaction_curve
from frontrack.pvar import (StepFunction, brute_force_p_sum, love_young_check, max_p_sum, max_p_sum_power,
                            multiplicative_bound_check, p_variation_seq, p_variation_step, prefix_p_sums,
                            riemann_jumps, suffix_p_sums, vector_p_variation, zeta, zeta_partial_sum)

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
short_seqs = st.lists(finite, min_size=0, max_size=12)
exponents = st.sampled_from([1.0, 1.2, 1.5, 2.0])


def enumerate_partitions(x, p):
    """Second, independent enumerator: choose cut positions as index subsets."""
    n = len(x)
    if n == 0:
        return 0.0
    best = 0.0
    for r in range(n):
        for cuts in itertools.combinations(range(1, n), r):
            bounds = (0,) + cuts + (n,)
            total = sum(abs(sum(x[a:b])) ** p for a, b in zip(bounds[:-1], bounds[1:]))
            best = max(best, total)
    return best ** (1.0 / p)


# --- examples -----------------------------------------------------------------

def test_single_entry_is_its_absolute_value():
    for p in (1.0, 1.3, 2.0, 3.0):
        assert max_p_sum([-2.5], p) == pytest.approx(2.5, rel=1e-15)


def test_p_one_is_total_variation():
    x = [0.3, -1.2, 4.0, -0.1, 0.0, 2.2]
    assert max_p_sum(x, 1.0) == pytest.approx(sum(abs(v) for v in x), rel=1e-14)


@pytest.mark.parametrize("x, expected", [((5, -2, 5), 8.0), ((5, -1, 5), 9.0), ((1, -1, 1, -1), 2.0)])
def test_small_sequences_against_enumeration(x, expected):
    assert enumerate_partitions(list(x), 2.0) == pytest.approx(expected, rel=1e-14)
    assert max_p_sum(x, 2.0) == pytest.approx(expected, rel=1e-14)


def test_shrinking_an_entry_can_increase_the_sum():
    # the p-sum is not monotone in the modulus of the entries
    assert max_p_sum((5, -1, 5), 2.0) > max_p_sum((5, -2, 5), 2.0)


def test_brute_force_examples():
    assert brute_force_p_sum([], 2.0) == 0.0
    assert brute_force_p_sum([3.0], 2.0) == 3.0
    assert brute_force_p_sum([1.0, 1.0], 2.0) == pytest.approx(2.0)


def test_brute_force_guard():
    with pytest.raises(GuardError):
        brute_force_p_sum(np.ones(21), 2.0)


def test_empty_and_non_finite():
    assert max_p_sum([], 1.5) == 0.0
    with pytest.raises(InvalidInputError):
        max_p_sum([1.0, np.nan], 2.0)
    with pytest.raises(InvalidInputError):
        max_p_sum([1.0, np.inf], 2.0)
    with pytest.raises(InvalidInputError):
        max_p_sum([1.0], 0.5)


def test_p_variation_of_paths():
    assert p_variation_seq([2.0, 2.0, 2.0], 1.5) == 0.0
    assert p_variation_seq([4.0], 1.5) == 0.0
    assert p_variation_seq([0, 1, 0, 1], 1.0) == pytest.approx(3.0)
    assert p_variation_seq([0, 5, 3, 8], 2.0) == pytest.approx(8.0)
    with pytest.raises(InvalidInputError):
        p_variation_seq([], 2.0)


def test_step_function_variation():
    assert p_variation_step(StepFunction.constant(1.0), 2.0) == 0.0
    single = StepFunction([0.5], [1.0, -0.25])
    assert p_variation_step(single, 1.3) == pytest.approx(1.25)
    f = StepFunction([0.0, 1.0, 2.0], [0.0, 5.0, 3.0, 8.0])
    assert p_variation_step(f, 2.0) == pytest.approx(8.0)
    assert p_variation_step(f, 2.0, window=(0.5, 2.5)) == pytest.approx(np.hypot(2, 5))


def test_step_function_rejects_bad_breakpoints():
    with pytest.raises(InvalidInputError):
        StepFunction([1.0, 0.0], [0.0, 1.0, 2.0])


def test_vector_variation_examples():
    model = builtin_p_system()
    assert vector_p_variation(StepFunction.constant(model.base), 1.25, model) == 0.0
    s = 0.07
    ur = rarefaction_curve(model, 1, s, model.base)
    u = StepFunction([0.0], [model.base, ur])
    assert vector_p_variation(u, 1.25, model) == pytest.approx(s, rel=1e-10)


def test_vector_variation_recomposes_scalar_sums():
    model = builtin_p_system()
    rng = np.random.default_rng(11)
    vals = np.vstack([model.base, model.sample_ball(6, seed=5, factor=0.5)])
    u = StepFunction(np.sort(rng.uniform(-1, 1, 6)), vals)
    d1, d2 = riemann_jumps(u, model)
    p = 1.25
    expected = (enumerate_partitions(list(d1), p) ** p + enumerate_partitions(list(d2), p) ** p) ** (1 / p)
    assert vector_p_variation(u, p, model) == pytest.approx(expected, rel=1e-12)


def test_zeta_matches_partial_sums():
    for s in (4.0 / 3.0, 1.5, 2.0):
        assert zeta(s) == pytest.approx(zeta_partial_sum(s), rel=1e-10)
    assert zeta(2.0) == pytest.approx(np.pi ** 2 / 6, rel=1e-14)
    with pytest.raises(ConditionError):
        zeta(1.0)


def test_love_young_examples():
    rep = love_young_check([0.0, 0.0], [0.0, 0.0], 1.5, 1.5)
    assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.holds
    rep = love_young_check([1.0, -1.0], [1.0, 1.0], 1.5, 1.5)
    rhs = (1 + zeta_partial_sum(4.0 / 3.0)) * max_p_sum([1, -1], 1.5) * max_p_sum([1, 1], 1.5)
    assert rep.lhs == pytest.approx(1.0)
    assert rep.rhs == pytest.approx(rhs, rel=1e-10)
    assert rep.holds
    with pytest.raises(ConditionError):
        love_young_check([1.0], [1.0], 2.0, 2.0)


def test_multiplicative_examples():
    rng = np.random.default_rng(4)
    a = rng.normal(size=9)
    rep = multiplicative_bound_check(a, np.ones(9), 1.5)
    assert rep.lhs == pytest.approx(max_p_sum(a, 1.5))
    assert rep.ratio <= 1.0 + 1e-12
    assert multiplicative_bound_check(np.zeros(5), rng.normal(size=5), 1.5).lhs == 0.0
    with pytest.raises(ConditionError):
        multiplicative_bound_check(a, a, 2.0)


def test_multiplicative_constant_stable_under_doubling():
    rng = np.random.default_rng(9)

    def worst(n):
        return max(multiplicative_bound_check(rng.normal(size=n), rng.normal(size=n), 1.5).ratio
                   for _ in range(500))
    c8, c16 = worst(8), worst(16)
    assert np.isfinite(c8) and np.isfinite(c16)
    assert c16 <= 2 * c8 + 1e-12


# --- properties -----------------------------------------------------------------

@settings(max_examples=300, deadline=None)
@given(short_seqs, exponents)
def test_dynamic_program_matches_brute_force(x, p):
    brute = brute_force_p_sum(x, p)
    assert abs(max_p_sum(x, p) - brute) <= 1e-12 * (1 + brute)


@settings(max_examples=200, deadline=None)
@given(short_seqs, st.floats(min_value=1.0, max_value=3.0))
def test_between_max_entry_and_total_variation(x, p):
    s = max_p_sum(x, p)
    assert s <= max_p_sum(x, 1.0) * (1 + 1e-12) + 1e-12
    assert s >= max((abs(v) for v in x), default=0.0) * (1 - 1e-12)


@settings(max_examples=200, deadline=None)
@given(short_seqs, exponents, st.floats(min_value=-5, max_value=5))
def test_homogeneity_and_reversal(x, p, lam):
    s = max_p_sum(x, p)
    assert max_p_sum([lam * v for v in x], p) == pytest.approx(abs(lam) * s, rel=1e-10, abs=1e-12)
    assert max_p_sum(x[::-1], p) == pytest.approx(s, rel=1e-12, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(short_seqs, short_seqs, exponents)
def test_concatenation_is_superadditive_in_power(x, y, p):
    both = max_p_sum_power(x + y, p)
    assert both >= (max_p_sum_power(x, p) + max_p_sum_power(y, p)) * (1 - 1e-12) - 1e-12


@settings(max_examples=200, deadline=None)
@given(short_seqs, exponents)
def test_prefix_and_suffix_tables(x, p):
    pre, suf = prefix_p_sums(x, p), suffix_p_sums(x, p)
    assert pre[-1] == pytest.approx(suf[0], rel=1e-12, abs=1e-12)
    assert np.all(np.diff(pre) >= -1e-12 * (1 + pre[1:]))
    for j in range(len(x) + 1):
        assert pre[j] == pytest.approx(max_p_sum_power(x[:j], p), rel=1e-12, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(min_value=-3, max_value=3), min_size=1, max_size=10),
       st.lists(st.floats(min_value=-3, max_value=3), min_size=1, max_size=10))
def test_love_young_direct_double_sum(x, y):
    n = min(len(x), len(y))
    x, y = x[:n], y[:n]
    rep = love_young_check(x, y, 1.4, 1.4)
    direct = abs(sum(x[i] * y[j] for j in range(n) for i in range(j + 1)))
    assert rep.lhs == pytest.approx(direct, rel=1e-12, abs=1e-12)
    assert rep.holds


@settings(max_examples=100, deadline=None)
@given(st.lists(finite, min_size=2, max_size=10), st.floats(min_value=-2, max_value=2), exponents)
def test_window_monotone(vals, shift, p):
    xs = np.arange(len(vals) - 1, dtype=float)
    f = StepFunction(xs, vals)
    inner = p_variation_step(f, p, window=(1.0 + shift * 0.1, len(vals) - 3.0))
    outer = p_variation_step(f, p, window=(-10.0, 100.0))
    assert outer >= inner * (1 - 1e-12) - 1e-12
    assert outer == pytest.approx(p_variation_step(f, p), rel=1e-14)
