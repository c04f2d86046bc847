# -*- coding: utf-8 -*-
"""
Command-line interface of the scenario runner.

    riemcontrol run CONFIG [--out DIR] [--seed N] [--h FLOAT] [-v]
    riemcontrol validate CONFIG
    riemcontrol suite [--filter NAME] [--parallel] [--out DIR] [-v]
    riemcontrol list

Exit codes: 0 if every criterion passed (or the config is valid), 1 if a
criterion failed (or the config has violations), 2 on errors.

Created on Mon Oct 19 15:02:36 2026

@author: riemcontrol developers
"""
from __future__ import division, print_function
import argparse
import sys
from .exceptions import RiemcontrolError
from .scenarios import ScenarioConfig, acceptance_table, bundled_config, \
    list_scenarios, run, run_suite, validate


def _run(args):
    config = ScenarioConfig.from_file(args.config)
    report = run(config.with_overrides(seed=args.seed, h=args.h), args.out,
                 args.verbose)
    print(acceptance_table([report]))
    print("Output written to " + report.csv_path)
    return 0 if report.passed else 1


def _validate(args):
    violations = validate(ScenarioConfig.from_file(args.config))
    for violation in violations:
        print(violation)
    if not violations:
        print("OK")
    return 1 if violations else 0


def _suite(args):
    reports = run_suite(args.filter, args.out, args.parallel, args.verbose)
    if not reports:
        print("No bundled scenario matches " + repr(args.filter),
              file=sys.stderr)
        return 2
    print(acceptance_table(reports))
    return 0 if all(r.passed for r in reports) else 1


def _list(args):
    for name in list_scenarios():
        print("%-28s %s" % (name, bundled_config(name).scenario))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="riemcontrol",
        description="Run geometric control scenarios and check their "
                    "predicted convergence rates.")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("run", help="run one scenario file")
    p.add_argument("config", help="path to a TOML scenario file")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--seed", type=int, default=None,
                   help="override the seed of the scenario")
    p.add_argument("--h", type=float, default=None,
                   help="override the integration step")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.set_defaults(func=_run)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("config", help="path to a TOML scenario file")
    p.set_defaults(func=_validate)

    p = sub.add_parser("suite", help="run the bundled scenarios")
    p.add_argument("--filter", default=None,
                   help="run only scenarios whose name contains FILTER")
    p.add_argument("--parallel", action="store_true",
                   help="one worker process per scenario")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.set_defaults(func=_suite)

    p = sub.add_parser("list", help="list the bundled scenarios")
    p.set_defaults(func=_list)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except (RiemcontrolError, OSError) as exc:
        print("Error: " + str(exc), file=sys.stderr)
        return 2
