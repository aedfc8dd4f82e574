"""Monte Carlo estimate of log growth under i.i.d. repetition of one event.

The uniform for trial t is output t of a Philox stream keyed by the seed, so
each draw is a pure function of (seed, t) and any chunking of the trials
gives the same result. Outcomes come from inverse-CDF lookup. Log wealth takes
only n distinct values, so the reduction is done on outcome counts, which is
exact and independent of evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import KellyError, ZeroTrials
from .market import MarketEvent, Strategy, expected_log_growth, terminal_wealth

#: trials per Philox block; a multiple of 4 so every chunk starts on a counter boundary
CHUNK = 1 << 16
#: growths closer than this share a rank
RANK_TOL = 1e-12


@dataclass(frozen=True)
class SimulationResult:
    trials: int
    mean_log_wealth: float
    std_error: float
    analytic_growth: float
    seed: int

    @property
    def z_score(self) -> float:
        if self.std_error == 0:
            return 0.0 if self.mean_log_wealth == self.analytic_growth else math.inf
        return (self.mean_log_wealth - self.analytic_growth) / self.std_error


def _uniforms(seed: int, start: int, count: int) -> np.ndarray:
    bitgen = np.random.Philox(key=seed, counter=start // 4)
    return np.random.Generator(bitgen).random(count)


def outcome_counts(probabilities, trials: int, seed: int, chunk: int = CHUNK) -> np.ndarray:
    """How often each outcome occurs in ``trials`` seeded i.i.d. draws."""
    if chunk % 4:
        raise ValueError("chunk must be a multiple of 4")
    cdf = np.cumsum(probabilities)
    n = cdf.size
    counts = np.zeros(n, dtype=np.int64)
    for start in range(0, trials, chunk):
        u = _uniforms(seed, start, min(chunk, trials - start))
        # u * total guards against the cdf ending a hair below 1
        idx = np.searchsorted(cdf, u * cdf[-1], side="right")
        counts += np.bincount(np.minimum(idx, n - 1), minlength=n)
    return counts


def simulate_growth(
    event: MarketEvent, strategy: Strategy, trials: int, seed: int = 0, chunk: int = CHUNK
) -> SimulationResult:
    if trials < 1:
        raise ZeroTrials(f"trials must be at least 1, got {trials}")
    analytic = expected_log_growth(event, strategy)  # raises on a zero-wealth state
    log_w = np.log(terminal_wealth(event, strategy).wealth)

    counts = outcome_counts(event.probabilities, trials, seed, chunk)
    seen = counts > 0
    if np.ptp(log_w[seen]) == 0:
        mean = float(log_w[seen][0])
        return SimulationResult(trials, mean, 0.0, analytic, seed)

    mean = math.fsum((counts[seen] * log_w[seen]).tolist()) / trials
    if trials == 1:
        return SimulationResult(trials, mean, 0.0, analytic, seed)
    sq = math.fsum((counts[seen] * (log_w[seen] - mean) ** 2).tolist())
    std_error = math.sqrt(sq / (trials - 1)) / math.sqrt(trials)
    return SimulationResult(trials, mean, std_error, analytic, seed)


class StrategyRank(NamedTuple):
    growth: float
    rank: int
    error: str | None = None


def compare_strategies(event: MarketEvent, strategies: Sequence[Strategy]) -> list[StrategyRank]:
    """Analytic growth per strategy with competition ranking (1 is best).

    A strategy's rank is one plus the number of strategies whose growth exceeds
    it by more than RANK_TOL. Strategies with an impossible log score -inf and
    carry the error message.
    """
    growths, errors = [], []
    for strategy in strategies:
        try:
            growths.append(expected_log_growth(event, strategy))
            errors.append(None)
        except KellyError as exc:
            growths.append(-math.inf)
            errors.append(f"{type(exc).__name__}: {exc}")
    g = np.array(growths)
    ranks = [1 + int(np.count_nonzero(g > gi + RANK_TOL)) for gi in g]
    return [StrategyRank(float(gi), r, e) for gi, r, e in zip(g, ranks, errors)]
