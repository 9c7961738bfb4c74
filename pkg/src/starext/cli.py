"""Batch driver: run scenario suites, write a report and a decision log.

Exit codes: 0 all checks passed (undecidable tolerated unless --strict),
1 suite failures, 2 parse or configuration errors, 3 broken filter
consistency or replay divergence.

The report and the log depend only on the scenario and the flags, never
on wall-clock or filesystem specifics, so a rerun (or a rerun under
--replay against the previous log) is byte-identical.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConsistencyViolation, ParseError, ReplayMismatch
from .hyper import Universe
from .oracle import DecisionLog, OracleState
from .scenario import Scenario, bundled_scenario_path, load_scenario
from .suites import SUITE_RUNNERS, SuiteContext, SuiteReport, run_suites

REPORT_NAME = "report.txt"
LOG_NAME = "decisions.log"


def render_report(scenario: Scenario, horizon: int, strict: bool,
                  reports: list[SuiteReport]) -> str:
    head = [
        "# starext suite report",
        f"scenario: {scenario.name}",
        f"horizon: {horizon}",
        f"seed: {scenario.seed}",
        f"tiebreak: {scenario.tiebreak}",
        f"strict: {str(strict).lower()}",
        "",
    ]
    body = [r.render() for r in reports]
    passes = sum(r.passes for r in reports)
    fails = sum(r.failures for r in reports)
    undec = sum(r.undecided for r in reports)
    verdict = "ok" if fails == 0 and (not strict or undec == 0) else "failed"
    tail = f"overall: pass={passes} fail={fails} undecidable={undec} verdict={verdict}"
    return "\n".join(head) + "\n".join(body) + tail + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="starext",
        description="Run verification suites over a scenario file.",
    )
    parser.add_argument("scenario", help="scenario file, or the name of a bundled one")
    parser.add_argument("--suite", action="append", default=None,
                        help="suite to run (repeatable); default: the scenario's list")
    parser.add_argument("--horizon", type=int, default=None,
                        help="override the oracle horizon")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the scenario seed")
    parser.add_argument("--strict", action="store_true",
                        help="undecidable verdicts fail the run")
    parser.add_argument("--replay", metavar="LOG", default=None,
                        help="verify decisions against a previous decision log")
    parser.add_argument("--out", metavar="DIR", default="starext-out",
                        help="output directory (default: starext-out)")
    args = parser.parse_args(argv)

    try:
        path = Path(args.scenario)
        if not path.exists():
            path = bundled_scenario_path(args.scenario)
        scenario = load_scenario(path)
    except (ParseError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.seed is not None:
        scenario.seed = args.seed
    suites = args.suite if args.suite else scenario.suites
    if not suites:
        print("error: no suites selected", file=sys.stderr)
        return 2
    unknown = [s for s in suites if s not in SUITE_RUNNERS]
    if unknown:
        print(f"error: unknown suites {unknown}", file=sys.stderr)
        return 2

    replay_log = None
    if args.replay:
        try:
            replay_log = DecisionLog.read(args.replay)
        except (OSError, ValueError) as exc:
            print(f"error: cannot read replay log: {exc}", file=sys.stderr)
            return 2

    try:
        config = scenario.oracle_config(horizon=args.horizon)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    oracle = OracleState(config, replay_log=replay_log)
    universe = Universe(oracle)
    ctx = SuiteContext(scenario, universe)

    try:
        reports = run_suites(ctx, suites)
        oracle.check_consistency()
    except ReplayMismatch as exc:
        print(f"replay mismatch: {exc}", file=sys.stderr)
        return 3
    except ConsistencyViolation as exc:
        print(f"consistency violation: {exc}", file=sys.stderr)
        return 3

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_text = render_report(scenario, config.horizon, args.strict, reports)
    (out_dir / REPORT_NAME).write_text(report_text)
    oracle.log.write(out_dir / LOG_NAME)

    fails = sum(r.failures for r in reports)
    undec = sum(r.undecided for r in reports)
    passes = sum(r.passes for r in reports)
    print(f"{scenario.name}: pass={passes} fail={fails} undecidable={undec}")
    print(f"report: {out_dir / REPORT_NAME}")
    print(f"decision log: {out_dir / LOG_NAME} ({len(oracle.log)} entries)")
    if fails > 0:
        return 1
    if args.strict and undec > 0:
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
