"""Rewrite the CLI golden files under tests/golden from tests/data.

Run after an intentional change to the --json output format, then review the diff.
"""

import contextlib
import io
import sys
from pathlib import Path

from kelly_greedy.cli import main

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "tests" / "data"
GOLDEN = ROOT / "tests" / "golden"

# golden name -> argv after the subcommand's --input
CASES = {
    "solve_binary": ["solve", "binary.csv"],
    "solve_example_c": ["solve", "example_c.json"],
    "trace_example_b": ["trace", "example_b.csv", "--state-prices"],
    "trace_no_edge": ["trace", "no_edge.csv"],
    "trace_single": ["trace", "single.csv"],
    "simulate_binary_seed42": ["simulate", "binary.csv", "--trials", "100000", "--seed", "42"],
    "simulate_no_edge": ["simulate", "no_edge.csv", "--trials", "1000", "--seed", "7"],
    "check_example_b_enumeration": ["check", "example_b.csv", "--state-prices", "--method", "enumeration"],
    "check_binary_ascent": ["check", "binary.csv", "--method", "ascent"],
}


def argv_for(case):
    command, filename, *rest = case
    return [command, "--input", str(DATA / filename), "--json", *rest]


def run(case):
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = main(argv_for(case))
    return code, out.getvalue()


if __name__ == "__main__":
    GOLDEN.mkdir(exist_ok=True)
    for name, case in CASES.items():
        code, text = run(case)
        if code != 0:
            sys.exit(f"{name}: exit {code}")
        (GOLDEN / f"{name}.json").write_text(text, encoding="utf-8")
        print(f"wrote {name}.json")
