"""Independent optimizers used to cross-check the greedy solver.

None of these share code with the greedy pass. Support enumeration tries
every candidate active set; grid search scans a lattice on the strategy
simplex; projected ascent runs multi-start projected gradient on the raw
objective.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BadStep, KellyError, TooManyOutcomes
from .market import MarketEvent
from .solver import fixed_support_optimize, greedy_solve

MAX_ENUMERATION_OUTCOMES = 20
MAX_GRID_OUTCOMES = 3
DEFAULT_SEED = 20240601
_TINY = 1e-300


@dataclass(frozen=True, eq=False)
class OracleReport:
    method: str
    best_growth: float
    best_wealth: np.ndarray
    best_cash: float
    best_stakes: np.ndarray
    solver_growth: float
    solver_wealth: np.ndarray
    max_wealth_deviation: float

    @property
    def growth_gap(self) -> float:
        """Solver growth minus oracle growth (nonnegative when the solver wins)."""
        return self.solver_growth - self.best_growth


def _report(method, event, growth, cash, stakes):
    sol = greedy_solve(event)
    stakes = np.asarray(stakes, dtype=float)
    wealth = cash + stakes / event.state_prices
    return OracleReport(
        method=method,
        best_growth=float(growth),
        best_wealth=wealth,
        best_cash=float(cash),
        best_stakes=stakes,
        solver_growth=sol.growth,
        solver_wealth=sol.wealth,
        max_wealth_deviation=float(np.max(np.abs(wealth - sol.wealth))),
    )


def enumerate_supports_solve(event: MarketEvent) -> OracleReport:
    """Best of all-cash, full investment, and every feasible proper support."""
    n = event.n
    if n > MAX_ENUMERATION_OUTCOMES:
        raise TooManyOutcomes(
            f"support enumeration is limited to {MAX_ENUMERATION_OUTCOMES} outcomes, got {n}"
        )
    best = (0.0, 1.0, np.zeros(n))
    candidates = itertools.chain.from_iterable(
        itertools.combinations(range(n), size) for size in range(1, n + 1)
    )
    for support in candidates:
        try:
            fs = fixed_support_optimize(event, support)
        except KellyError:
            # Q_A >= 1 or a non-positive stake: not a valid active support
            continue
        if fs.growth > best[0]:
            best = (fs.growth, fs.cash, fs.stakes)
    return _report("enumeration", event, *best)


def _lattice(parts: int, m: int) -> np.ndarray:
    """All nonnegative integer vectors of length ``parts`` (1 to 3) summing to ``m``."""
    if parts == 1:
        return np.array([[m]])
    if parts == 2:
        a = np.arange(m + 1)
        return np.column_stack([a, m - a])
    row, col = np.tril_indices(m + 1)
    return np.column_stack([col, row - col, m - row])


def grid_search_solve(event: MarketEvent, step: float = 1e-3) -> OracleReport:
    """Exhaustive scan of {(c, x) >= 0 : c + sum x = 1} on a lattice of spacing ``step``.

    Lattice points leaving some state with zero wealth score -inf. Among equal
    scores the point with the most cash wins.
    """
    n = event.n
    if n > MAX_GRID_OUTCOMES:
        raise TooManyOutcomes(f"grid search is limited to {MAX_GRID_OUTCOMES} outcomes, got {n}")
    if not 0.0 < step <= 0.01:
        raise BadStep(f"grid step must lie in (0, 0.01], got {step!r}")
    m = round(1.0 / step)
    if abs(m * step - 1.0) > 1e-9:
        raise BadStep(f"grid step {step!r} does not divide 1")

    p, q = event.probabilities, event.state_prices
    best_growth, best_point = -np.inf, None
    # one slab per cash level keeps memory bounded; high cash first so ties keep the cash
    for cash_units in range(m, -1, -1):
        stakes = _lattice(n, m - cash_units) / m
        cash = cash_units / m
        wealth = cash + stakes / q
        with np.errstate(divide="ignore"):
            logs = np.log(wealth)
        logs[wealth <= 0] = -np.inf
        growth = logs @ p
        j = int(np.argmax(growth))
        if growth[j] > best_growth:
            best_growth, best_point = float(growth[j]), (cash, stakes[j])
    return _report("grid", event, best_growth, *best_point)


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row of ``v`` onto the probability simplex."""
    v = np.atleast_2d(v)
    u = -np.sort(-v, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    ks = np.arange(1, v.shape[1] + 1)
    rho = np.count_nonzero(u - css / ks > 0, axis=1)
    theta = css[np.arange(v.shape[0]), rho - 1] / rho
    return np.maximum(v - theta[:, None], 0.0)


def projected_ascent_solve(
    event: MarketEvent,
    iterations: int = 10_000,
    seed: int = DEFAULT_SEED,
    starts: int = 4,
    initial_step: float = 0.5,
) -> OracleReport:
    """Multi-start projected gradient ascent on the expected log growth.

    Variables are v = (c, x_1, ..., x_n) on the unit simplex. Each start takes
    steps of size s / sqrt(t + 1); a step that lowers the objective or zeroes a
    state's wealth is rejected and that start's scale s is halved. Starts are
    the all-cash point plus ``starts`` seeded interior draws.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    n = event.n
    p, q = event.probabilities, event.state_prices
    rng = np.random.default_rng(seed)
    v = np.vstack([np.eye(1, n + 1), rng.dirichlet(np.ones(n + 1), size=starts)])

    def objective(points):
        wealth = points[:, :1] + points[:, 1:] * inv_q
        g = np.log(np.maximum(wealth, _TINY)) @ p
        g[wealth.min(axis=1) <= 0] = -np.inf
        return g, wealth

    inv_q = 1.0 / q
    value, wealth = objective(v)
    scale = np.full(len(v), initial_step)
    grad = np.empty_like(v)
    for t in range(iterations):
        ratio = p / wealth
        grad[:, 0] = ratio.sum(axis=1)
        np.multiply(ratio, inv_q, out=grad[:, 1:])
        trial = project_simplex(v + (scale / np.sqrt(t + 1.0))[:, None] * grad)
        trial_value, trial_wealth = objective(trial)
        better = trial_value >= value
        v[better] = trial[better]
        wealth[better] = trial_wealth[better]
        value[better] = trial_value[better]
        scale[~better] *= 0.5
        scale[better] = np.minimum(scale[better] * 1.5, initial_step)

    j = int(np.argmax(value))
    return _report("ascent", event, value[j], v[j, 0], v[j, 1:])


@dataclass(frozen=True)
class InstanceConfig:
    """Random market generator.

    Probabilities are a flat Dirichlet draw; state prices are another flat
    Dirichlet draw scaled outcome-wise by Uniform(price_low, price_high),
    so the overround averages (price_low + price_high) / 2.
    """

    count: int = 1000
    min_outcomes: int = 2
    max_outcomes: int = 8
    price_low: float = 0.8
    price_high: float = 1.4
    seed: int = DEFAULT_SEED


def random_event(rng: np.random.Generator, n: int, price_low=0.8, price_high=1.4) -> MarketEvent:
    while True:
        p = rng.dirichlet(np.ones(n))
        q = rng.dirichlet(np.ones(n)) * rng.uniform(price_low, price_high, size=n)
        if np.all(p > 0) and np.all(q > 0):
            return MarketEvent(tuple(f"o{i}" for i in range(n)), p, q)


def random_events(config: InstanceConfig = InstanceConfig()):
    rng = np.random.default_rng(config.seed)
    for _ in range(config.count):
        n = int(rng.integers(config.min_outcomes, config.max_outcomes + 1))
        yield random_event(rng, n, config.price_low, config.price_high)


def random_strategies(rng: np.random.Generator, n: int, size: int) -> np.ndarray:
    """Rows (c, x_1..x_n) drawn uniformly from the open strategy simplex."""
    return rng.dirichlet(np.ones(n + 1), size=size)
