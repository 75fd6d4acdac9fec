"""Command line entry point: ``lwx run <scenario> [--out DIR] [--seed S] [--jobs K] [--list-checks]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .checks import REGISTRY
from .scenario import Scenario, ScenarioError, exit_code, report_csv, report_json, run_scenario

EXIT_PARSE = 2


def shipped_scenarios_dir():
    return Path(__file__).resolve().parents[2] / "scenarios"


def resolve_scenario(arg):
    """A path, or the bare name of a shipped scenario."""
    path = Path(arg)
    if path.exists():
        return path
    for candidate in (Path("scenarios") / f"{arg}.toml", shipped_scenarios_dir() / f"{arg}.toml"):
        if candidate.exists():
            return candidate
    raise ScenarioError(f"no scenario file or shipped scenario named {arg!r}")


def _parser():
    p = argparse.ArgumentParser(prog="lwx", description="Run verification scenarios.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="evaluate a scenario and write JSON and CSV reports")
    run.add_argument("scenario", nargs="?", help="scenario file or shipped scenario name")
    run.add_argument("--out", default="reports", help="output directory (default: reports)")
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument("--jobs", type=int, default=1, help="checks evaluated concurrently")
    run.add_argument("--list-checks", action="store_true", help="list check ids and exit")
    return p


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else 0
    if args.list_checks:
        for cid in sorted(REGISTRY):
            c = REGISTRY[cid]
            order = "-" if c.expected_order is None else f"{c.expected_order:g}"
            print(f"{cid:28s} tol={c.tolerance:<8g} order={order:<3s} {c.description}")
        return 0
    if args.scenario is None:
        print("error: a scenario is required", file=sys.stderr)
        return EXIT_PARSE
    if args.seed is not None and args.seed < 0:
        print("error: seed must be non-negative", file=sys.stderr)
        return EXIT_PARSE
    try:
        scenario = Scenario.from_file(resolve_scenario(args.scenario))
        report = run_scenario(scenario, seed=args.seed, jobs=max(1, args.jobs))
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{scenario.name}.json").write_text(report_json(report), encoding="utf-8")
    (out / f"{scenario.name}.csv").write_text(report_csv(report), encoding="utf-8")
    seen = set()
    for rec in report["results"]:
        if rec["check"] in seen:
            continue
        seen.add(rec["check"])
        last = [r for r in report["results"] if r["check"] == rec["check"]][-1]
        tag = " (exploratory)" if last["exploratory"] else ""
        res = "nan" if last["residual"] is None else f"{last['residual']:.3e}"
        print(f"{last['status']:12s} {last['check']}{tag}  residual={res}")
    code = exit_code(report)
    print(f"exit {code}; reports in {out}")
    return code


if __name__ == "__main__":
    sys.exit(main())
