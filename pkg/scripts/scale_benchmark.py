"""Time the greedy solver on large synthetic books and check its invariants.

    python scripts/scale_benchmark.py --sizes 1000 100000 1000000
"""

import argparse
import time

import numpy as np

from kelly_greedy.market import from_state_prices
from kelly_greedy.solver import greedy_solve, invariant_violations


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", type=int, nargs="+", default=[10**3, 10**4, 10**5, 10**6])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'n':>9} {'best s':>8} {'active':>9} {'cash':>10} violations")
    for n in args.sizes:
        p = rng.dirichlet(np.ones(n))
        q = rng.dirichlet(np.ones(n)) * rng.uniform(0.8, 1.4, n)
        event = from_state_prices([""] * n, p, q)
        times = []
        for _ in range(args.repeat):
            t = time.perf_counter()
            sol = greedy_solve(event)
            times.append(time.perf_counter() - t)
        problems = invariant_violations(event, sol)
        print(f"{n:>9} {min(times):>8.3f} {len(sol.active_set):>9} {sol.cash:>10.6f} {problems or 'none'}")


if __name__ == "__main__":
    main()
