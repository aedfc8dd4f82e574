"""Closed-form full-Kelly solver for a single multinomial event.

Holding cash c is the same, state by state, as an implicit stake c*q_i on
every outcome. On an active support the optimal total stake on outcome i is
p_i, so the explicit bet only tops it up: x_i = (p_i - c*q_i)_+. The cash
level itself comes from a greedy pass over outcomes sorted by edge ratio
r_i = p_i/q_i: keep adding outcomes while r exceeds the current cash level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    CashOutOfRange,
    EmptySupport,
    NonpositiveBudget,
    NonpositiveWeight,
    OverroundSupport,
    ParameterOutOfRange,
    PositivityViolation,
)
from .market import (
    MarketEvent,
    Strategy,
    WealthVector,
    edge_ratios,
    expected_log_growth,
    log_growth_of_wealth,
    terminal_wealth,
)

#: relative width of the band |r - c| treated as a tie, both when accepting and for boundary_ties
TIE_TOL = 1e-12


def weighted_log_allocate(weights: Sequence[float], budget: float) -> np.ndarray:
    """Maximize sum a_i ln z_i subject to sum z_i = budget.

    The maximizer is proportional to the weights: z_i = budget * a_i / sum(a).
    """
    a = np.asarray(weights, dtype=float).ravel()
    if a.size == 0 or not np.all(a > 0):
        raise NonpositiveWeight("weights must be nonempty and strictly positive")
    if not budget > 0:
        raise NonpositiveBudget(f"budget must be positive, got {budget!r}")
    return (budget / np.sum(a)) * a


@dataclass(frozen=True, eq=False)
class FixedSupportSolution:
    support: tuple[int, ...]
    cash: float
    stakes: np.ndarray
    effective_stakes: np.ndarray  # aligned with ``support``
    wealth: WealthVector
    growth: float

    @property
    def strategy(self) -> Strategy:
        return Strategy(self.cash, self.stakes)


def _check_support(event: MarketEvent, support: Iterable[int]) -> tuple[int, ...]:
    members = tuple(sorted({int(i) for i in support}))
    if not members:
        raise EmptySupport("support must contain at least one outcome")
    if members[0] < 0 or members[-1] >= event.n:
        raise IndexError(f"support {members} out of range for {event.n} outcomes")
    return members


def fixed_support_optimize(event: MarketEvent, support: Iterable[int]) -> FixedSupportSolution:
    """Best strategy whose explicit stakes are confined to ``support``.

    For a proper support A with Q_A < 1 the cash level is
    c_A = (1 - P_A) / (1 - Q_A) and x_i = p_i - c_A q_i on A. Passing every
    outcome returns the full-investment solution c = 0, x = p.
    """
    members = _check_support(event, support)
    p, q = event.probabilities, event.state_prices
    idx = np.array(members, dtype=np.intp)

    if len(members) == event.n:
        stakes = p.copy()
        cash = 0.0
    else:
        mask = np.zeros(event.n, dtype=bool)
        mask[idx] = True
        q_support = float(np.sum(q[idx]))
        if q_support >= 1.0:
            raise OverroundSupport(
                f"support {members} has state prices summing to {q_support!r} >= 1; "
                "the optimum collapses to a smaller support"
            )
        # 1 - P_A summed directly over the complement, which is exact when p sums to 1
        cash = float(np.sum(p[~mask])) / (1.0 - q_support)
        raw = p[idx] - cash * q[idx]
        bad = np.flatnonzero(raw <= 0)
        if bad.size:
            i = members[int(bad[0])]
            raise PositivityViolation(
                f"outcome {i} has p_i <= c_A q_i ({p[i]!r} <= {cash!r} * {q[i]!r})", index=i
            )
        stakes = np.zeros(event.n)
        stakes[idx] = raw

    strategy = Strategy(cash, stakes)
    wealth = terminal_wealth(event, strategy)
    return FixedSupportSolution(
        support=members,
        cash=cash,
        stakes=strategy.stakes,
        effective_stakes=stakes[idx] + cash * q[idx],
        wealth=wealth,
        growth=log_growth_of_wealth(p, wealth.wealth),
    )


def support_value_function(event: MarketEvent, support: Iterable[int], cash: float) -> float:
    """Objective at cash level ``cash`` with inner stakes optimally split over ``support``.

    The effective stakes y_i = x_i + c q_i share the budget 1 - c(1 - Q_A) in
    proportion to p_i. States outside the support are left at wealth c.
    """
    members = _check_support(event, support)
    if len(members) == event.n:
        raise EmptySupport("value function is defined for proper supports only")
    if not 0.0 < cash < 1.0:
        raise CashOutOfRange(f"cash must lie in (0, 1), got {cash!r}")
    p, q = event.probabilities, event.state_prices
    idx = np.array(members, dtype=np.intp)
    budget = 1.0 - cash * (1.0 - float(np.sum(q[idx])))
    y = weighted_log_allocate(p[idx], budget)
    wealth = np.full(event.n, float(cash))
    wealth[idx] = y / q[idx]
    return log_growth_of_wealth(p, wealth)


@dataclass(frozen=True)
class GreedyStep:
    position: int  # 1-based rank in the sorted order
    index: int  # original outcome index
    ratio: float
    cash_before: float
    accepted: bool
    cash_after: float | None
    support_probability: float | None  # P_{k+1} when accepted
    support_price: float | None  # Q_{k+1} when accepted


class GreedyTrace(Sequence[GreedyStep]):
    """Record of the greedy pass, stored column-wise.

    Holds one row per examined outcome, ending with the stopping row when the
    pass stops early. Rows materialize as GreedyStep on access so that large
    markets do not allocate a million small objects.
    """

    def __init__(self, order, ratios, cash_before, accepted, cash_after, prefix_p, prefix_q):
        self.order = order
        self.ratios = ratios
        self.cash_before = cash_before
        self.accepted = accepted
        self.cash_after = cash_after
        self.prefix_p = prefix_p
        self.prefix_q = prefix_q

    def __len__(self) -> int:
        return self.order.size

    def __getitem__(self, k):
        if isinstance(k, slice):
            return [self[i] for i in range(*k.indices(len(self)))]
        if k < 0:
            k += len(self)
        if not 0 <= k < len(self):
            raise IndexError(k)
        ok = bool(self.accepted[k])
        return GreedyStep(
            position=k + 1,
            index=int(self.order[k]),
            ratio=float(self.ratios[k]),
            cash_before=float(self.cash_before[k]),
            accepted=ok,
            cash_after=float(self.cash_after[k]) if ok else None,
            support_probability=float(self.prefix_p[k]) if ok else None,
            support_price=float(self.prefix_q[k]) if ok else None,
        )

    def __iter__(self) -> Iterator[GreedyStep]:
        return (self[k] for k in range(len(self)))

    @property
    def accepted_count(self) -> int:
        return int(np.count_nonzero(self.accepted))


@dataclass(frozen=True, eq=False)
class KellySolution:
    cash: float
    stakes: np.ndarray
    wealth: np.ndarray
    active_set: tuple[int, ...]
    growth: float
    trace: GreedyTrace
    boundary_ties: tuple[int, ...]

    @property
    def strategy(self) -> Strategy:
        return Strategy(self.cash, self.stakes)


def greedy_solve(event: MarketEvent) -> KellySolution:
    """Optimal full-Kelly strategy for ``event``.

    Outcomes are visited by decreasing edge ratio (ties by original index).
    Starting from c_0 = 1, outcome k+1 is accepted while r_{k+1} > c_k (beyond
    the TIE_TOL band), after
    which c_{k+1} = (1 - P_{k+1}) / (1 - Q_{k+1}). Accepting every outcome
    means full investment with c* = 0.
    """
    p, q = event.probabilities, event.state_prices
    n = event.n
    r = edge_ratios(event)
    order = np.argsort(-r, kind="stable")
    r_sorted, p_sorted, q_sorted = r[order], p[order], q[order]

    prefix_p = np.cumsum(p_sorted)
    prefix_q = np.cumsum(q_sorted)
    # 1 - P_k as a tail sum keeps the numerator positive when P_k is close to 1
    tail_p = np.cumsum(p_sorted[::-1])[::-1]
    # cash[k] = c_k for k = 0..n-1; cash levels past the stopping point are never read
    cash = np.empty(n)
    cash[0] = 1.0
    if n > 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            cash[1:] = tail_p[1:] / (1.0 - prefix_q[:-1])
        cash[1:][prefix_q[:-1] >= 1.0] = np.inf

    # a ratio inside the tie band of the cash level counts as r <= c, so rounding
    # noise on an exact tie stops the pass instead of adding a zero stake
    with np.errstate(invalid="ignore"):
        edge = r_sorted - cash > TIE_TOL * np.maximum(1.0, cash)
    stops = np.flatnonzero(~edge)
    k_star = int(stops[0]) if stops.size else n
    c_star = float(cash[k_star]) if k_star < n else 0.0

    examined = min(k_star + 1, n)
    accepted = np.zeros(examined, dtype=bool)
    accepted[:k_star] = True
    cash_after = np.full(examined, np.nan)
    cash_after[: min(k_star, n - 1)] = cash[1 : min(k_star, n - 1) + 1]
    if k_star == n:
        cash_after[n - 1] = 0.0
    trace = GreedyTrace(
        order=order[:examined],
        ratios=r_sorted[:examined],
        cash_before=cash[:examined],
        accepted=accepted,
        cash_after=cash_after,
        prefix_p=prefix_p[:examined],
        prefix_q=prefix_q[:examined],
    )

    active = np.sort(order[:k_star])
    if k_star == n:
        stakes = p.copy()
    else:
        stakes = np.zeros(n)
        stakes[active] = np.maximum(p[active] - c_star * q[active], 0.0)

    strategy = Strategy(c_star, stakes)
    wealth = terminal_wealth(event, strategy).wealth
    ties = np.flatnonzero(np.abs(r - c_star) <= TIE_TOL * max(1.0, c_star))
    return KellySolution(
        cash=c_star,
        stakes=strategy.stakes,
        wealth=wealth,
        active_set=tuple(active.tolist()),
        growth=expected_log_growth(event, strategy),
        trace=trace,
        boundary_ties=tuple(ties.tolist()),
    )


def binary_closed_form(p1: float, q1: float) -> tuple[float, float]:
    """Cash and stake on outcome 1 for a two-outcome event.

    With an edge (p1 > q1) this is the one-bet Kelly fraction in state-price
    form: c = (1 - p1)/(1 - q1), x = (p1 - q1)/(1 - q1). Otherwise stay in cash.
    """
    if not (0.0 < p1 < 1.0 and 0.0 < q1 < 1.0):
        raise ParameterOutOfRange(f"need 0 < p1 < 1 and 0 < q1 < 1, got p1={p1!r}, q1={q1!r}")
    if p1 <= q1:
        return 1.0, 0.0
    return (1.0 - p1) / (1.0 - q1), (p1 - q1) / (1.0 - q1)


def invariant_violations(event: MarketEvent, sol: KellySolution) -> list[str]:
    """Check a solution against the closed-form structure; empty list means clean."""
    p, q = event.probabilities, event.state_prices
    r = edge_ratios(event)
    c = sol.cash
    problems = []

    budget = c + float(np.sum(sol.stakes))
    if abs(budget - 1.0) > 1e-9:
        problems.append(f"budget sums to {budget!r}")
    plus = np.maximum(p - c * q, 0.0)
    dev = float(np.max(np.abs(sol.stakes - plus)))
    if dev > 1e-12:
        problems.append(f"stakes deviate from (p - c q)_+ by {dev:.3g}")
    dev = float(np.max(np.abs(sol.wealth - np.maximum(c, r))))
    if dev > 1e-9:
        problems.append(f"wealth deviates from max(c, r) by {dev:.3g}")
    if sol.growth < 0:
        problems.append(f"growth {sol.growth!r} is negative")

    trace = sol.trace
    k = trace.accepted_count
    if not np.all(trace.accepted[:k]) or np.any(trace.accepted[k:]):
        problems.append("accepted outcomes are not a prefix of the sorted order")
    if set(sol.active_set) != set(trace.order[:k].tolist()):
        problems.append("active set differs from the accepted prefix")
    if np.any(sol.stakes[list(sol.active_set)] <= 0) if sol.active_set else False:
        problems.append("an accepted outcome has a zero stake")
    levels = np.concatenate(([1.0], trace.cash_after[:k]))
    if np.any(np.diff(levels) >= 0):
        problems.append("cash does not strictly decrease over accepted steps")
    proper = k if k < event.n else event.n - 1
    if proper and np.any(trace.prefix_q[:proper] >= 1.0):
        problems.append("an accepted proper support has Q >= 1")
    if sol.active_set:
        a = np.array(sol.active_set)
        dev = float(np.max(np.abs(sol.stakes[a] + c * q[a] - p[a])))
        if dev > 1e-12:
            problems.append(f"effective stakes deviate from p by {dev:.3g}")
        if k < event.n:
            dev = abs(1.0 - c * (1.0 - float(np.sum(q[a]))) - float(np.sum(p[a])))
            if dev > 1e-12:
                problems.append(f"budget identity off by {dev:.3g}")
    return problems
