"""Market instances, strategies and the expected-log-growth objective.

A market is a single event with n mutually exclusive outcomes. Outcome i has
a subjective probability p_i and a state price q_i = 1/O_i, where O_i is the
decimal odds. A strategy holds cash c and stakes x_i with c + sum(x) = 1; if
outcome i occurs, wealth becomes c + x_i / q_i.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    InfeasibleStrategy,
    LengthMismatch,
    NonpositiveOdds,
    NonpositiveProbability,
    NonpositiveWealthState,
    ProbabilitySumViolation,
)

#: probabilities further than this from summing to one are rejected
PROBABILITY_SUM_TOL = 1e-6
#: sums closer to one than this are left alone, so reordering outcomes is exact
RENORMALIZE_ABOVE = 1e-12
#: budget tolerance for c + sum(x) = 1
BUDGET_TOL = 1e-9


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MarketEvent:
    labels: tuple[str, ...]
    probabilities: np.ndarray
    state_prices: np.ndarray
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        labels = tuple(str(label) for label in self.labels)
        p = np.asarray(self.probabilities, dtype=float).ravel()
        q = np.asarray(self.state_prices, dtype=float).ravel()
        if not (len(labels) == p.size == q.size):
            raise LengthMismatch(
                f"labels, probabilities and state prices differ in length "
                f"({len(labels)}, {p.size}, {q.size})"
            )
        if p.size == 0:
            raise LengthMismatch("a market needs at least one outcome")
        bad = np.flatnonzero(~(p > 0))
        if bad.size:
            i = int(bad[0])
            raise NonpositiveProbability(
                f"probability of outcome {labels[i]!r} must be positive, got {p[i]!r}"
            )
        bad = np.flatnonzero(~(q > 0) | ~np.isfinite(q))
        if bad.size:
            i = int(bad[0])
            raise NonpositiveOdds(
                f"state price of outcome {labels[i]!r} must be positive and finite, got {q[i]!r}"
            )
        total = float(np.sum(p))
        if not abs(total - 1.0) <= PROBABILITY_SUM_TOL:
            raise ProbabilitySumViolation(
                f"probabilities sum to {total!r}, more than {PROBABILITY_SUM_TOL:g} away from 1"
            )
        if abs(total - 1.0) > RENORMALIZE_ABOVE:
            p = p / total

        notes = list(self.warnings)
        for i in np.flatnonzero(q >= 1.0):
            notes.append(
                f"outcome {labels[i]!r} has decimal odds {1.0 / q[i]:.6g} <= 1; it can never be staked"
            )

        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probabilities", _frozen(p))
        object.__setattr__(self, "state_prices", _frozen(q))
        object.__setattr__(self, "warnings", tuple(notes))

    @property
    def n(self) -> int:
        return self.probabilities.size

    @property
    def decimal_odds(self) -> np.ndarray:
        return 1.0 / self.state_prices

    @property
    def overround(self) -> float:
        return float(np.sum(self.state_prices))

    def permuted(self, order: Sequence[int]) -> "MarketEvent":
        """Return the same market with outcomes listed in ``order``."""
        order = np.asarray(order, dtype=np.intp)
        return MarketEvent(
            tuple(self.labels[i] for i in order),
            self.probabilities[order],
            self.state_prices[order],
        )


def from_decimal_odds(labels, probabilities, odds) -> MarketEvent:
    """Build a market from probabilities and decimal odds (q_i = 1/O_i)."""
    labels = tuple(labels)
    p = np.asarray(probabilities, dtype=float).ravel()
    o = np.asarray(odds, dtype=float).ravel()
    if not (len(labels) == p.size == o.size):
        raise LengthMismatch(
            f"labels, probabilities and odds differ in length ({len(labels)}, {p.size}, {o.size})"
        )
    bad = np.flatnonzero(~(o > 0) | ~np.isfinite(o))
    if bad.size:
        i = int(bad[0])
        raise NonpositiveOdds(f"decimal odds of outcome {labels[i]!r} must be positive, got {o[i]!r}")
    return MarketEvent(labels, p, 1.0 / o)


def from_state_prices(labels, probabilities, state_prices) -> MarketEvent:
    return MarketEvent(tuple(labels), probabilities, state_prices)


@dataclass(frozen=True, eq=False)
class Strategy:
    """Cash fraction plus per-outcome stakes, all as fractions of current wealth."""

    cash: float
    stakes: np.ndarray

    def __post_init__(self):
        c = float(self.cash)
        x = np.asarray(self.stakes, dtype=float).ravel()
        if not c >= 0 or not np.all(x >= 0):
            raise InfeasibleStrategy("cash and stakes must be nonnegative")
        total = c + float(np.sum(x))
        if not abs(total - 1.0) <= BUDGET_TOL:
            raise InfeasibleStrategy(f"cash plus stakes sum to {total!r}, not 1")
        object.__setattr__(self, "cash", c)
        object.__setattr__(self, "stakes", _frozen(x))

    @classmethod
    def all_cash(cls, n: int) -> "Strategy":
        return cls(1.0, np.zeros(n))


@dataclass(frozen=True, eq=False)
class WealthVector:
    wealth: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "wealth", _frozen(np.asarray(self.wealth, dtype=float).ravel()))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.wealth, dtype=dtype)

    def __len__(self):
        return self.wealth.size


def edge_ratios(event: MarketEvent) -> np.ndarray:
    """r_i = p_i / q_i: subjective over market-implied probability."""
    return event.probabilities / event.state_prices


def terminal_wealth(event: MarketEvent, strategy: Strategy) -> WealthVector:
    if strategy.stakes.size != event.n:
        raise LengthMismatch(f"strategy has {strategy.stakes.size} stakes for {event.n} outcomes")
    return WealthVector(strategy.cash + strategy.stakes / event.state_prices)


def log_growth_of_wealth(probabilities, wealth) -> float:
    """sum p_i ln W_i, raising if a state with p_i > 0 has W_i <= 0."""
    p = np.asarray(probabilities, dtype=float)
    w = np.asarray(wealth, dtype=float)
    dead = np.flatnonzero((w <= 0) & (p > 0))
    if dead.size:
        raise NonpositiveWealthState(
            f"state {int(dead[0])} has terminal wealth {w[dead[0]]!r}; log growth is -inf"
        )
    return float(np.dot(p, np.log(w)))


def expected_log_growth(event: MarketEvent, strategy: Strategy) -> float:
    """Expected log terminal wealth in nats."""
    return log_growth_of_wealth(event.probabilities, terminal_wealth(event, strategy).wealth)
