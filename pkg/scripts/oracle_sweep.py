"""Compare the greedy solver with support enumeration and projected ascent on random books.

    python scripts/oracle_sweep.py --count 1000 --max-outcomes 8
    python scripts/oracle_sweep.py --count 100 --max-outcomes 6 --ascent-iterations 3000
"""

import argparse
import time
from dataclasses import asdict

import numpy as np

from kelly_greedy.oracle import (
    InstanceConfig,
    enumerate_supports_solve,
    projected_ascent_solve,
    random_events,
)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--count", type=int, default=1000)
    parser.add_argument("--min-outcomes", type=int, default=2)
    parser.add_argument("--max-outcomes", type=int, default=8)
    parser.add_argument("--seed", type=int, default=InstanceConfig.seed)
    parser.add_argument("--ascent-iterations", type=int, default=0, help="0 skips the ascent oracle")
    args = parser.parse_args()

    config = InstanceConfig(
        count=args.count, min_outcomes=args.min_outcomes, max_outcomes=args.max_outcomes, seed=args.seed
    )
    print(asdict(config))
    enum_gaps, enum_wealth, ascent_gaps, sizes = [], [], [], []
    t = time.perf_counter()
    for event in random_events(config):
        sizes.append(event.n)
        rep = enumerate_supports_solve(event)
        enum_gaps.append(abs(rep.growth_gap))
        enum_wealth.append(rep.max_wealth_deviation)
        if args.ascent_iterations:
            ascent_gaps.append(projected_ascent_solve(event, args.ascent_iterations).growth_gap)
    elapsed = time.perf_counter() - t

    print(f"instances         {len(sizes)} (n from {min(sizes)} to {max(sizes)})")
    print(f"enumeration       max |growth gap| {max(enum_gaps):.3e}, max wealth dev {max(enum_wealth):.3e}")
    if ascent_gaps:
        g = np.array(ascent_gaps)
        print(f"ascent            min gap {g.min():.3e}, median {np.median(g):.3e}, max {g.max():.3e}")
        print(f"                  within 1e-6 on {np.mean(g <= 1e-6):.1%}")
    print(f"elapsed           {elapsed:.1f}s")


if __name__ == "__main__":
    main()
