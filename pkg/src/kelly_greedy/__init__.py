"""Log-optimal (full Kelly) stakes for a single event with mutually exclusive outcomes."""

from .errors import KellyError
from .market import (
    MarketEvent,
    Strategy,
    WealthVector,
    edge_ratios,
    expected_log_growth,
    from_decimal_odds,
    from_state_prices,
    terminal_wealth,
)
from .oracle import (
    OracleReport,
    enumerate_supports_solve,
    grid_search_solve,
    projected_ascent_solve,
)
from .simulator import SimulationResult, compare_strategies, simulate_growth
from .solver import (
    FixedSupportSolution,
    GreedyStep,
    GreedyTrace,
    KellySolution,
    binary_closed_form,
    fixed_support_optimize,
    greedy_solve,
    support_value_function,
    weighted_log_allocate,
)

__all__ = [
    "KellyError",
    "MarketEvent",
    "Strategy",
    "WealthVector",
    "edge_ratios",
    "expected_log_growth",
    "from_decimal_odds",
    "from_state_prices",
    "terminal_wealth",
    "OracleReport",
    "enumerate_supports_solve",
    "grid_search_solve",
    "projected_ascent_solve",
    "SimulationResult",
    "compare_strategies",
    "simulate_growth",
    "FixedSupportSolution",
    "GreedyStep",
    "GreedyTrace",
    "KellySolution",
    "binary_closed_form",
    "fixed_support_optimize",
    "greedy_solve",
    "support_value_function",
    "weighted_log_allocate",
]
