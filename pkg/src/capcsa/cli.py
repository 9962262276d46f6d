"""Command line entry point: ``capcsa {base,optimize,compare}``.

Exit codes: 0 success, 2 parse/validation error, 3 load-flow non-convergence.
"""

from __future__ import annotations

import argparse
import sys

from capcsa.network import NetworkError
from capcsa.report import (
    CompareError,
    NonConvergenceError,
    compare_runs,
    format_table,
    load_report,
    read_cited_rows,
    run_base,
    run_optimized,
    summarize,
    write_comparison,
    write_report,
)
from capcsa.scenario import ScenarioError, load_scenario

EXIT_OK, EXIT_INVALID, EXIT_DIVERGED = 0, 2, 3


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", default="ieee33_11kv",
                        help="scenario file, or a name looked up in $CAPCSA_SCENARIO_DIR "
                             "and the bundled scenarios (default: %(default)s)")
    common.add_argument("--out", default="results", help="output directory (default: %(default)s)")
    common.add_argument("--seed", type=int, help="override the scenario seed")
    common.add_argument("--quiet", action="store_true")

    parser = argparse.ArgumentParser(prog="capcsa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("base", parents=[common], help="load flow without capacitors")
    opt = sub.add_parser("optimize", parents=[common], help="optimize capacitor size and location")
    opt.add_argument("--optimizer", choices=["csa", "pso"])
    cmp_ = sub.add_parser("compare", parents=[common],
                          help="table of base, CSA and PSO runs plus cited reference rows")
    cmp_.add_argument("reports", nargs="*", help="existing *_report.json files; "
                                                 "if omitted, base, csa and pso are run")
    cmp_.add_argument("--no-cited", action="store_true", help="omit cited reference rows")
    return parser


def _run(args, say):
    scenario = load_scenario(args.scenario).with_overrides(seed=args.seed)
    if args.command == "base":
        rep = run_base(scenario)
        write_report(rep, args.out)
        say(summarize(rep))
        return

    if args.command == "optimize":
        base = run_base(scenario)
        rep = run_optimized(scenario, args.optimizer, base=base)
        write_report(base, args.out)
        write_report(rep, args.out)
        say(summarize(base))
        say(summarize(rep))
        return

    if args.reports:
        reports = [load_report(p) for p in args.reports]
    else:
        base = run_base(scenario)
        reports = [base] + [run_optimized(scenario, o, base=base) for o in ("csa", "pso")]
        for rep in reports:
            write_report(rep, args.out)
    rows = compare_runs(reports, () if args.no_cited else read_cited_rows())
    write_comparison(rows, args.out)
    say(format_table(rows))


def main(argv=None):
    args = build_parser().parse_args(argv)
    say = (lambda *a: None) if args.quiet else print
    try:
        _run(args, say)
    except (ScenarioError, NetworkError, CompareError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
