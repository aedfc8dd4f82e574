"""Command-line front end.

    kelly-greedy solve    --input book.csv [--json]
    kelly-greedy trace    --input book.json
    kelly-greedy simulate --input book.csv --trials 100000 --seed 42
    kelly-greedy check    --input book.csv --method enumeration

Input is CSV with header ``label,probability,decimal_odds`` or JSON
``{"outcomes": [{"label": ..., "probability": ..., "decimal_odds": ...}]}``.
With ``--state-prices`` the third field holds q_i instead of decimal odds.

Exit codes: 0 success, 1 invariant or tolerance failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    DuplicateLabel,
    InvariantViolation,
    KellyError,
    NonpositiveOdds,
    NonpositiveProbability,
)
from .market import MarketEvent, from_decimal_odds, from_state_prices
from .oracle import (
    DEFAULT_SEED,
    enumerate_supports_solve,
    grid_search_solve,
    projected_ascent_solve,
)
from .simulator import simulate_growth
from .solver import KellySolution, greedy_solve, invariant_violations

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

ENUMERATION_GROWTH_TOL = 1e-9
ENUMERATION_WEALTH_TOL = 1e-8
ASCENT_GROWTH_TOL = 1e-6
ASCENT_DOMINANCE_SLACK = 1e-9
GRID_DOMINANCE_SLACK = 1e-12

PRICE_COLUMNS = ("decimal_odds", "state_price")


class InputError(KellyError):
    """Malformed market file; the message carries the location."""


@dataclass(frozen=True)
class MarketRecord:
    label: str
    probability: float
    price: float
    where: str  # "line 3" or "outcomes[2]"


def _number(text, what, where):
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise InputError(f"{where}: {what} {text!r} is not a number") from None
    if not math.isfinite(value):
        raise InputError(f"{where}: {what} must be finite, got {text!r}")
    return value


def _read_csv(text: str) -> list[MarketRecord]:
    reader = csv.reader(io.StringIO(text))
    records = []
    header = None
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        where = f"line {reader.line_num}"
        cells = [cell.strip() for cell in row]
        if header is None:
            header = [cell.lower() for cell in cells]
            if header[:2] != ["label", "probability"] or len(header) != 3 or header[2] not in PRICE_COLUMNS:
                raise InputError(f"{where}: expected header 'label,probability,decimal_odds', got {row!r}")
            continue
        if len(cells) != 3:
            raise InputError(f"{where}: expected 3 fields, got {len(cells)}")
        records.append(
            MarketRecord(
                cells[0],
                _number(cells[1], "probability", where),
                _number(cells[2], header[2], where),
                where,
            )
        )
    if header is None:
        raise InputError("line 1: empty input")
    return records


def _read_json(text: str) -> list[MarketRecord]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("outcomes"), list):
        raise InputError('line 1: expected an object with an "outcomes" list')
    records = []
    for k, item in enumerate(doc["outcomes"]):
        where = f"outcomes[{k}]"
        if not isinstance(item, dict):
            raise InputError(f"{where}: expected an object")
        key = next((c for c in PRICE_COLUMNS if c in item), None)
        if "label" not in item or "probability" not in item or key is None:
            raise InputError(f"{where}: needs label, probability and decimal_odds")
        records.append(
            MarketRecord(
                str(item["label"]),
                _number(item["probability"], "probability", where),
                _number(item[key], key, where),
                where,
            )
        )
    return records


def load_market(path: str, fmt: str | None = None, state_prices: bool = False) -> MarketEvent:
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if fmt is None:
        suffix = Path(path).suffix.lower()
        if suffix in (".csv", ".json"):
            fmt = suffix[1:]
        else:
            fmt = "json" if text.lstrip().startswith("{") else "csv"
    records = _read_json(text) if fmt == "json" else _read_csv(text)
    if not records:
        raise InputError("no outcomes in input")

    seen = {}
    for rec in records:
        if rec.label in seen:
            raise DuplicateLabel(f"{rec.where}: label {rec.label!r} already used at {seen[rec.label]}")
        seen[rec.label] = rec.where
        if not rec.probability > 0:
            raise NonpositiveProbability(f"{rec.where}: probability must be positive, got {rec.probability!r}")
        if not rec.price > 0:
            raise NonpositiveOdds(f"{rec.where}: price must be positive, got {rec.price!r}")

    labels = [r.label for r in records]
    p = [r.probability for r in records]
    prices = [r.price for r in records]
    if state_prices:
        return from_state_prices(labels, p, prices)
    return from_decimal_odds(labels, p, prices)


def _num(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "-"
    return f"{x:#.12g}"


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _trace_rows(event: MarketEvent, sol: KellySolution) -> list[dict]:
    return [
        {
            "position": step.position,
            "index": step.index,
            "label": event.labels[step.index],
            "ratio": step.ratio,
            "cash_before": step.cash_before,
            "decision": "ACCEPT" if step.accepted else "STOP",
            "cash_after": step.cash_after,
        }
        for step in sol.trace
    ]


def _tie_warnings(event: MarketEvent, sol: KellySolution) -> list[str]:
    return [
        f"boundary tie: outcome {event.labels[i]!r} has edge ratio equal to the cash level; "
        "the strategy is not unique (wealth is)"
        for i in sol.boundary_ties
    ]


def _solve_and_verify(event: MarketEvent) -> KellySolution:
    sol = greedy_solve(event)
    problems = invariant_violations(event, sol)
    if problems:
        raise InvariantViolation("; ".join(problems))
    return sol


def cmd_solve(args) -> int:
    event = load_market(args.input, args.format, args.state_prices)
    sol = _solve_and_verify(event)
    r = event.probabilities / event.state_prices
    active = set(sol.active_set)
    ties = set(sol.boundary_ties)
    warnings = list(event.warnings) + _tie_warnings(event, sol)

    if args.json:
        _emit(
            {
                "cash": sol.cash,
                "growth": sol.growth,
                "stakes": sol.stakes.tolist(),
                "wealth": sol.wealth.tolist(),
                "active_set": [event.labels[i] for i in sol.active_set],
                "boundary_ties": [event.labels[i] for i in sol.boundary_ties],
                "outcomes": [
                    {
                        "label": label,
                        "probability": float(event.probabilities[i]),
                        "state_price": float(event.state_prices[i]),
                        "edge_ratio": float(r[i]),
                        "stake": float(sol.stakes[i]),
                        "wealth": float(sol.wealth[i]),
                        "active": i in active,
                    }
                    for i, label in enumerate(event.labels)
                ],
                "trace": _trace_rows(event, sol),
                "warnings": warnings,
            }
        )
        return EXIT_OK

    out = sys.stdout
    out.write(f"cash           {_num(sol.cash)}\n")
    out.write(f"growth (nats)  {_num(sol.growth)}\n\n")
    width = max(5, max(len(label) for label in event.labels))
    cols = ("probability", "state_price", "edge_ratio", "stake", "wealth")
    out.write(f"{'label':<{width}}  " + "  ".join(f"{c:>15}" for c in cols) + "  active\n")
    for i, label in enumerate(event.labels):
        values = (event.probabilities[i], event.state_prices[i], r[i], sol.stakes[i], sol.wealth[i])
        flag = "yes" if i in active else ("tie" if i in ties else "no")
        out.write(f"{label:<{width}}  " + "  ".join(f"{_num(v):>15}" for v in values) + f"  {flag}\n")
    for w in warnings:
        out.write(f"warning: {w}\n")
    return EXIT_OK


def cmd_trace(args) -> int:
    event = load_market(args.input, args.format, args.state_prices)
    sol = _solve_and_verify(event)
    rows = _trace_rows(event, sol)
    if args.json:
        _emit({"cash": sol.cash, "accepted": sol.trace.accepted_count, "steps": rows})
        return EXIT_OK
    for row in rows:
        line = f"{row['position']:>4}  {row['label']}  {_num(row['ratio'])}  {_num(row['cash_before'])}  {row['decision']}"
        if row["decision"] == "ACCEPT":
            line += f"  {_num(row['cash_after'])}"
        sys.stdout.write(line + "\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.trials < 1:
        raise InputError(f"--trials must be at least 1, got {args.trials}")
    event = load_market(args.input, args.format, args.state_prices)
    sol = _solve_and_verify(event)
    res = simulate_growth(event, sol.strategy, args.trials, args.seed)
    doc = {
        "analytic_growth": res.analytic_growth,
        "mean_log_wealth": res.mean_log_wealth,
        "std_error": res.std_error,
        "trials": res.trials,
        "seed": res.seed,
        "cash": sol.cash,
        "stakes": sol.stakes.tolist(),
    }
    if args.json:
        _emit(doc)
        return EXIT_OK
    for key in ("analytic_growth", "mean_log_wealth", "std_error"):
        sys.stdout.write(f"{key:<16} {_num(doc[key])}\n")
    sys.stdout.write(f"{'trials':<16} {res.trials}\n{'seed':<16} {res.seed}\n")
    return EXIT_OK


def cmd_check(args) -> int:
    event = load_market(args.input, args.format, args.state_prices)
    if args.method == "enumeration":
        report = enumerate_supports_solve(event)
        ok = (
            abs(report.growth_gap) <= ENUMERATION_GROWTH_TOL
            and report.max_wealth_deviation <= ENUMERATION_WEALTH_TOL
        )
        tolerance = {"growth": ENUMERATION_GROWTH_TOL, "wealth": ENUMERATION_WEALTH_TOL}
    elif args.method == "grid":
        report = grid_search_solve(event, args.grid_step)
        # lattice points sit within one step of the optimum; the growth loss is bounded by half a step
        bound = args.grid_step / 2
        ok = -GRID_DOMINANCE_SLACK <= report.growth_gap <= bound
        tolerance = {"growth": bound}
    else:
        if args.iterations < 1:
            raise InputError(f"--iterations must be at least 1, got {args.iterations}")
        seed = DEFAULT_SEED if args.seed is None else args.seed
        report = projected_ascent_solve(event, iterations=args.iterations, seed=seed)
        ok = -ASCENT_DOMINANCE_SLACK <= report.growth_gap <= ASCENT_GROWTH_TOL
        tolerance = {"growth": ASCENT_GROWTH_TOL}

    doc = {
        "method": report.method,
        "solver_growth": report.solver_growth,
        "oracle_growth": report.best_growth,
        "growth_gap": report.growth_gap,
        "max_wealth_deviation": report.max_wealth_deviation,
        "tolerance": tolerance,
        "passed": bool(ok),
    }
    if args.json:
        _emit(doc)
    else:
        for key in ("solver_growth", "oracle_growth", "growth_gap", "max_wealth_deviation"):
            sys.stdout.write(f"{key:<21} {_num(doc[key])}\n")
        sys.stdout.write(f"{'result':<21} {'PASS' if ok else 'FAIL'}\n")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kelly-greedy", description="Full-Kelly stakes for a single event.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, metavar="PATH", help="market file, or - for stdin")
    common.add_argument("--format", choices=("csv", "json"), help="override format inferred from extension")
    common.add_argument("--state-prices", action="store_true", help="third column is q_i, not decimal odds")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="optimal cash, stakes and growth").set_defaults(func=cmd_solve)
    sub.add_parser("trace", parents=[common], help="step-by-step greedy pass").set_defaults(func=cmd_trace)

    sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo growth of the optimal strategy")
    sim.add_argument("--trials", type=int, default=100_000)
    sim.add_argument("--seed", type=int, default=0)
    sim.set_defaults(func=cmd_simulate)

    chk = sub.add_parser("check", parents=[common], help="compare against an independent optimizer")
    chk.add_argument("--method", choices=("enumeration", "grid", "ascent"), default="enumeration")
    chk.add_argument("--grid-step", type=float, default=1e-3)
    chk.add_argument("--iterations", type=int, default=10_000)
    chk.add_argument("--seed", type=int, default=None)
    chk.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KellyError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE
    except InvariantViolation as exc:
        sys.stderr.write(f"internal invariant violated: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
