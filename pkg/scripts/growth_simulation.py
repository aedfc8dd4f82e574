"""Sampled versus analytic log growth for the Kelly strategy and scaled-down variants.

Scaling the optimal stakes by a factor (the rest held in cash) shows how growth
falls off on either side of the optimum.

    python scripts/growth_simulation.py --input tests/data/example_b.csv --state-prices
"""

import argparse

from kelly_greedy.cli import load_market
from kelly_greedy.market import Strategy
from kelly_greedy.simulator import compare_strategies, simulate_growth
from kelly_greedy.solver import greedy_solve


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--input", required=True)
    parser.add_argument("--state-prices", action="store_true")
    parser.add_argument("--trials", type=int, default=10**6)
    parser.add_argument("--seeds", type=int, default=5)
    parser.add_argument("--scales", type=float, nargs="+", default=[0.25, 0.5, 1.0, 1.5])
    args = parser.parse_args()

    event = load_market(args.input, state_prices=args.state_prices)
    sol = greedy_solve(event)
    strategies = []
    for s in args.scales:
        stakes = sol.stakes * s
        if stakes.sum() > 1:
            continue
        strategies.append((s, Strategy(1 - stakes.sum(), stakes)))

    ranks = compare_strategies(event, [st for _, st in strategies])
    print(f"{'scale':>6} {'analytic':>12} {'rank':>4} {'sampled mean':>13} {'max |z|':>8}")
    for (s, strategy), r in zip(strategies, ranks):
        if r.error:
            print(f"{s:>6} {'-inf':>12} {r.rank:>4}  {r.error}")
            continue
        runs = [simulate_growth(event, strategy, args.trials, seed) for seed in range(args.seeds)]
        mean = sum(x.mean_log_wealth for x in runs) / len(runs)
        zmax = max(abs(x.z_score) for x in runs)
        print(f"{s:>6} {r.growth:>12.8f} {r.rank:>4} {mean:>13.8f} {zmax:>8.2f}")


if __name__ == "__main__":
    main()
