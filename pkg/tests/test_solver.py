import itertools
import math
import time

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from kelly_greedy.errors import (
    CashOutOfRange,
    EmptySupport,
    NonpositiveBudget,
    NonpositiveWeight,
    OverroundSupport,
    ParameterOutOfRange,
    PositivityViolation,
)
from kelly_greedy.market import (
    Strategy,
    edge_ratios,
    expected_log_growth,
    from_state_prices,
)
from kelly_greedy.oracle import random_strategies
from kelly_greedy.solver import (
    TIE_TOL,
    binary_closed_form,
    fixed_support_optimize,
    greedy_solve,
    invariant_violations,
    support_value_function,
    weighted_log_allocate,
)

from conftest import events

G_BINARY = 0.6 * math.log(1.2) + 0.4 * math.log(0.8)
G_B = 0.5 * math.log(0.5 / 0.3) + 0.2 * math.log(0.5)
G_C = 0.5 * math.log(2.5) + 0.3 * math.log(1.5)


def test_frozen_growth_values():
    # direct evaluation of sum p ln W at the worked optima, rounded as published
    assert round(G_BINARY, 7) == 0.0201355
    assert round(G_B, 7) == 0.1167834
    assert round(G_C, 7) == 0.5797849


# weighted_log_allocate


@pytest.mark.parametrize(
    "a, budget, expected",
    [((2, 1), 6, (4, 2)), ((0.6, 0.4), 1, (0.6, 0.4)), ((1, 1, 1), 1, (1 / 3, 1 / 3, 1 / 3))],
)
def test_weighted_log_allocate_examples(a, budget, expected):
    np.testing.assert_allclose(weighted_log_allocate(a, budget), expected, atol=1e-15)


def test_weighted_log_allocate_errors():
    with pytest.raises(NonpositiveWeight):
        weighted_log_allocate([1.0, 0.0], 1.0)
    with pytest.raises(NonpositiveBudget):
        weighted_log_allocate([1.0, 2.0], 0.0)


@settings(max_examples=30)
@given(
    st.lists(st.floats(0.01, 5.0), min_size=1, max_size=8),
    st.floats(0.1, 10.0),
    st.integers(0, 2**32 - 1),
)
def test_weighted_log_allocate_beats_random_allocations(a, budget, seed):
    a = np.array(a)
    z = weighted_log_allocate(a, budget)
    assert abs(z.sum() - budget) <= 1e-12
    best = a @ np.log(z)
    rivals = np.random.default_rng(seed).dirichlet(np.ones(a.size), size=1000) * budget
    assert np.all(np.log(rivals) @ a <= best + 1e-12)


# fixed_support_optimize


def test_fixed_support_binary(binary):
    fs = fixed_support_optimize(binary, {0})
    assert fs.cash == pytest.approx(0.8, abs=1e-15)
    np.testing.assert_allclose(fs.stakes, [0.2, 0.0], atol=1e-15)
    np.testing.assert_allclose(fs.wealth.wealth, [1.2, 0.8], atol=1e-15)
    np.testing.assert_allclose(fs.effective_stakes, [0.6], atol=1e-15)


def test_fixed_support_example_b(example_b):
    fs = fixed_support_optimize(example_b, {0, 1})
    assert fs.cash == pytest.approx(0.5, abs=1e-15)
    np.testing.assert_allclose(fs.stakes, [0.35, 0.15, 0.0], atol=1e-15)
    np.testing.assert_allclose(fs.wealth.wealth, [5 / 3, 1.0, 0.5], atol=1e-15)
    np.testing.assert_allclose(fs.effective_stakes, [0.5, 0.3], atol=1e-15)
    assert fs.growth == pytest.approx(G_B, abs=1e-14)


def test_fixed_support_matches_one_dimensional_brute_force(example_b):
    # independent: scan cash with the inner stakes written out by hand
    c = np.linspace(1e-6, 1 - 1e-6, 2_000_001)
    y_budget = 1 - c * (1 - 0.6)
    g = 0.5 * np.log(y_budget * 0.5 / 0.8 / 0.3) + 0.3 * np.log(y_budget * 0.3 / 0.8 / 0.3) + 0.2 * np.log(c)
    assert c[g.argmax()] == pytest.approx(fixed_support_optimize(example_b, {0, 1}).cash, abs=1e-6)


def test_fixed_support_errors(example_b):
    with pytest.raises(EmptySupport):
        fixed_support_optimize(example_b, set())
    with pytest.raises(PositivityViolation) as info:
        # c_A = 0.8/0.6 > 1 leaves outcome three with p < c q
        fixed_support_optimize(example_b, {2})
    assert info.value.index == 2
    e = from_state_prices("abcd", [0.4, 0.3, 0.2, 0.1], [0.5, 0.5, 0.2, 0.1])
    with pytest.raises(OverroundSupport):
        fixed_support_optimize(e, {0, 1})


def test_fixed_support_overround_three_of_three_as_proper():
    # Q_A = 1 on a proper support of a four-outcome book
    e = from_state_prices("abcd", [0.45, 0.25, 0.15, 0.15], [0.3, 0.3, 0.4, 0.2])
    with pytest.raises(OverroundSupport):
        fixed_support_optimize(e, {0, 1, 2})


def test_fixed_support_full_support(example_c):
    fs = fixed_support_optimize(example_c, {0, 1, 2})
    assert fs.cash == 0.0
    np.testing.assert_array_equal(fs.stakes, example_c.probabilities)
    assert fs.growth == pytest.approx(G_C, abs=1e-14)


# support_value_function


def test_value_function_examples(binary):
    assert support_value_function(binary, {0}, 0.8) == pytest.approx(G_BINARY, abs=1e-15)
    v = support_value_function(binary, {0}, 0.5)
    assert v == pytest.approx(0.6 * math.log(1.5) + 0.4 * math.log(0.5), abs=1e-15)
    assert round(v, 7) == -0.0339798


def test_value_function_errors(binary):
    with pytest.raises(EmptySupport):
        support_value_function(binary, [], 0.5)
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(CashOutOfRange):
            support_value_function(binary, {0}, bad)


def test_value_function_peaks_at_support_cash(example_b):
    for support in ({0}, {0, 1}, {1}):
        c = (1 - sum(example_b.probabilities[list(support)])) / (
            1 - sum(example_b.state_prices[list(support)])
        )
        if not 0.01 < c < 0.99:
            continue
        mid = support_value_function(example_b, support, c)
        assert mid > support_value_function(example_b, support, c - 0.01)
        assert mid > support_value_function(example_b, support, c + 0.01)


# greedy_solve worked examples


def test_greedy_binary(binary):
    sol = greedy_solve(binary)
    assert sol.cash == pytest.approx(0.8, abs=1e-15)
    np.testing.assert_allclose(sol.stakes, [0.2, 0.0], atol=1e-15)
    np.testing.assert_allclose(sol.wealth, [1.2, 0.8], atol=1e-15)
    assert sol.active_set == (0,)
    assert sol.boundary_ties == (1,)
    assert sol.growth == pytest.approx(G_BINARY, abs=1e-15)


def test_greedy_example_b_trace(example_b):
    sol = greedy_solve(example_b)
    steps = list(sol.trace)
    assert [s.index for s in steps] == [0, 1, 2]
    assert [s.accepted for s in steps] == [True, True, False]
    assert steps[0].ratio == pytest.approx(5 / 3) and steps[0].cash_before == 1.0
    assert steps[0].cash_after == pytest.approx(0.5 / 0.7, abs=1e-15)
    assert steps[1].ratio == pytest.approx(1.0) and steps[1].cash_after == pytest.approx(0.5, abs=1e-15)
    assert steps[2].ratio == pytest.approx(0.5) and steps[2].cash_before == pytest.approx(0.5)
    assert steps[2].cash_after is None
    assert sol.cash == pytest.approx(0.5, abs=1e-15)
    np.testing.assert_allclose(sol.stakes, [0.35, 0.15, 0.0], atol=1e-15)
    assert sol.growth == pytest.approx(G_B, abs=1e-14)


def test_greedy_full_acceptance(example_c):
    sol = greedy_solve(example_c)
    assert sol.cash == 0.0
    np.testing.assert_array_equal(sol.stakes, [0.5, 0.3, 0.2])
    np.testing.assert_allclose(sol.wealth, [2.5, 1.5, 1.0], atol=1e-15)
    assert sol.trace[-1].cash_after == 0.0
    assert sol.growth == pytest.approx(G_C, abs=1e-14)


def test_greedy_no_edge(no_edge):
    sol = greedy_solve(no_edge)
    assert sol.cash == 1.0 and not sol.stakes.any() and sol.growth == 0.0
    assert len(sol.trace) == 1 and not sol.trace[0].accepted


def test_greedy_single_outcome():
    sol = greedy_solve(from_state_prices(["only"], [1.0], [0.5]))
    assert sol.cash == 0.0 and sol.stakes.tolist() == [1.0]
    assert sol.growth == math.log(2)


def test_greedy_single_outcome_without_edge():
    sol = greedy_solve(from_state_prices(["only"], [1.0], [1.25]))
    assert sol.cash == 1.0 and sol.growth == 0.0


def test_rounding_noise_tie_stops():
    # r = 0.2 / (1/3) rounds to 0.6000000000000001 while c_1 = 0.6 exactly
    e = from_state_prices("abc", [0.6, 0.2, 0.2], [1 / 3, 1.0, 1 / 3])
    sol = greedy_solve(e)
    assert sol.active_set == (0,) and sol.boundary_ties == (2,)
    assert invariant_violations(e, sol) == []


def test_sort_ties_broken_by_index():
    e = from_state_prices("abcd", [0.3, 0.3, 0.2, 0.2], [0.2, 0.2, 0.3, 0.3])
    sol = greedy_solve(e)
    assert [s.index for s in sol.trace][:2] == [0, 1]


def test_trace_sequence_protocol(example_b):
    trace = greedy_solve(example_b).trace
    assert len(trace) == 3
    assert trace[-1] == trace[2]
    assert [s.position for s in trace[0:2]] == [1, 2]
    with pytest.raises(IndexError):
        trace[3]


# binary_closed_form


def test_binary_closed_form_examples():
    c, x = binary_closed_form(0.6, 0.5)
    assert abs(c - 0.8) <= 1e-12 and abs(x - 0.2) <= 1e-12
    assert binary_closed_form(0.3, 0.3) == (1.0, 0.0)
    c, x = binary_closed_form(0.55, 0.4)
    assert abs(c - 0.45 / 0.6) <= 1e-12 and abs(x - 0.15 / 0.6) <= 1e-12
    sol = greedy_solve(from_state_prices("ab", [0.55, 0.45], [0.4, 0.6]))
    assert abs(sol.cash - c) <= 1e-12 and abs(sol.stakes[0] - x) <= 1e-12


@pytest.mark.parametrize("p1, q1", [(0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (0.5, 1.0), (1.2, 0.5)])
def test_binary_closed_form_range(p1, q1):
    with pytest.raises(ParameterOutOfRange):
        binary_closed_form(p1, q1)


@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_binary_closed_form_agrees_with_greedy(p1, q1):
    sol = greedy_solve(from_state_prices("ab", [p1, 1 - p1], [q1, 1 - q1]))
    if p1 >= q1:
        c, x = binary_closed_form(p1, q1)
        expected = [c + x / q1, c]
    else:
        # the edge is on outcome two; apply the formula to the mirrored book
        c, x = binary_closed_form(1 - p1, 1 - q1)
        expected = [c, c + x / (1 - q1)]
    np.testing.assert_allclose(sol.wealth, expected, atol=1e-12)


# properties on random markets


def _brute_force_optimum(e):
    """Best growth over all supports using only the textbook formulas."""
    p, q = e.probabilities, e.state_prices
    best = 0.0
    for size in range(1, e.n + 1):
        for A in itertools.combinations(range(e.n), size):
            A = list(A)
            if size == e.n:
                c = 0.0
            else:
                QA = q[A].sum()
                if QA >= 1:
                    continue
                c = (1 - p[A].sum()) / (1 - QA)
            if np.any(p[A] - c * q[A] <= 0):
                continue
            w = np.full(e.n, c)
            w[A] = p[A] / q[A]
            best = max(best, float(p @ np.log(w)))
    return best


@settings(max_examples=300)
@given(events())
def test_invariant_suite(e):
    assert invariant_violations(e, greedy_solve(e)) == []


@settings(max_examples=200)
@given(events(max_n=7))
def test_growth_matches_textbook_enumeration(e):
    assert abs(greedy_solve(e).growth - _brute_force_optimum(e)) <= 1e-9


@settings(max_examples=200)
@given(events())
def test_clipped_wealth_and_plus_part(e):
    sol = greedy_solve(e)
    r = edge_ratios(e)
    np.testing.assert_allclose(sol.wealth, np.maximum(sol.cash, r), rtol=0, atol=1e-9)
    plus = np.maximum(e.probabilities - sol.cash * e.state_prices, 0)
    np.testing.assert_allclose(sol.stakes, plus, rtol=0, atol=1e-12)
    assert abs(sol.cash + sol.stakes.sum() - 1) <= 1e-9


@settings(max_examples=200)
@given(events())
def test_monotone_cash_and_prefix(e):
    trace = greedy_solve(e).trace
    levels = [1.0] + [s.cash_after for s in trace if s.accepted]
    assert all(a > b for a, b in zip(levels, levels[1:]))
    flags = [s.accepted for s in trace]
    assert flags == sorted(flags, reverse=True)
    for s in trace:
        assert s.accepted == (s.ratio - s.cash_before > TIE_TOL * max(1.0, s.cash_before))
        if s.accepted and s.position < e.n:
            assert s.support_price < 1


@settings(max_examples=100)
@given(events(), st.integers(0, 2**32 - 1))
def test_dominates_random_strategies(e, seed):
    sol = greedy_solve(e)
    assert sol.growth >= 0
    v = random_strategies(np.random.default_rng(seed), e.n, 1000)
    w = v[:, :1] + v[:, 1:] / e.state_prices
    assert np.all(np.log(w) @ e.probabilities <= sol.growth + 1e-12)


@settings(max_examples=100)
@given(events(min_n=2))
def test_value_function_stationary_at_optimum(e):
    sol = greedy_solve(e)
    assume(0 < len(sol.active_set) < e.n)
    for eps in (1e-3, 1e-2):
        assume(0 < sol.cash - eps and sol.cash + eps < 1)
        mid = support_value_function(e, sol.active_set, sol.cash)
        assert mid > support_value_function(e, sol.active_set, sol.cash - eps)
        assert mid > support_value_function(e, sol.active_set, sol.cash + eps)


@settings(max_examples=100)
@given(events(), st.randoms(use_true_random=False))
def test_permutation_invariance(e, rnd):
    order = list(range(e.n))
    rnd.shuffle(order)
    a, b = greedy_solve(e), greedy_solve(e.permuted(order))
    np.testing.assert_allclose(b.wealth, a.wealth[order], atol=1e-12)
    if not a.boundary_ties:
        np.testing.assert_allclose(b.stakes, a.stakes[order], atol=1e-12)


@settings(max_examples=100)
@given(events())
def test_growth_is_objective_at_solution(e):
    sol = greedy_solve(e)
    assert sol.growth == expected_log_growth(e, Strategy(sol.cash, sol.stakes))


def test_scale_million_outcomes():
    rng = np.random.default_rng(12345)
    n = 10**6
    p = rng.dirichlet(np.ones(n))
    q = rng.dirichlet(np.ones(n)) * rng.uniform(0.8, 1.4, n)
    e = from_state_prices([""] * n, p, q)
    t = time.perf_counter()
    sol = greedy_solve(e)
    elapsed = time.perf_counter() - t
    assert invariant_violations(e, sol) == []
    assert elapsed < 1.0
