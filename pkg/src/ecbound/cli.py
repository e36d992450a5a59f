"""Command-line interface.

Subcommands: verify (hypothesis checklist), bound (divisibility
certificate), lemmas (enumeration suites), local-degree (local Kummer
degree at the conductor prime).

Exit codes: 0 success, 1 hypothesis or lemma failure, 2 input/parse
error, 3 insufficient precision or enumeration budget.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import engine
from .errors import BudgetError, HypothesisFailure, ParseError, PrecisionError

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_PRECISION = 3


def _load_records(path: str | None):
    if path is None:
        return engine.builtin_records()
    return engine.parse_curve_file(path)


def _env_precision() -> int | None:
    value = os.environ.get("ECBOUND_PRECISION")
    if value is None:
        return None
    try:
        parsed = int(value)
    except ValueError:
        raise ParseError(f"ECBOUND_PRECISION must be an integer, got {value!r}")
    if parsed < 3:
        raise ParseError("ECBOUND_PRECISION must be at least 3")
    return parsed


def _cmd_verify(args) -> int:
    records = _load_records(args.curves)
    if args.label is not None:
        records = [engine.find_record(records, args.label)]
    any_failed = False
    for record in records:
        result = engine.verify_hypotheses(record)
        print(f"== {record.label}")
        for item in result.items:
            print("  " + item.render())
        if result.all_required_pass:
            print("  all hypothesis checks passed")
        else:
            names = ", ".join(item.name for item in result.failed_required())
            print(f"  FAILED checks: {names}")
            any_failed = True
    return EXIT_FAILURE if any_failed else EXIT_OK


def _cmd_bound(args) -> int:
    records = _load_records(args.curves)
    record = engine.find_record(records, args.label)
    try:
        report = engine.compute_bound(record, args.n)
    except HypothesisFailure as exc:
        print(f"hypothesis failed: {exc.name} ({exc.detail})", file=sys.stderr)
        return EXIT_FAILURE
    print(engine.render_report(report, args.format))
    if report.exponent == 0:
        print("failing check: nontrivial_exponent (rank <= 2 certifies nothing)", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def _cmd_lemmas(args) -> int:
    report = engine.run_lemma_suite(args.suite, p=args.p, n=args.n, budget=args.budget)
    for item in report.items:
        print(item.render())
    if not report.passed:
        failed = ", ".join(item.name for item in report.items if not item.passed)
        print(f"suite {report.suite} FAILED: {failed}", file=sys.stderr)
        return EXIT_FAILURE
    print(f"suite {report.suite}: all {len(report.items)} verifications passed")
    return EXIT_OK


def _cmd_local_degree(args) -> int:
    records = _load_records(args.curves)
    record = engine.find_record(records, args.label)
    precision = args.precision if args.precision is not None else _env_precision()
    try:
        print(engine.local_degree_report(record, args.n, precision))
    except HypothesisFailure as exc:
        print(f"hypothesis failed: {exc.name} ({exc.detail})", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecbound",
        description="certified class-number divisibility bounds for elliptic curves of prime conductor",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run the hypothesis checklist")
    p_verify.add_argument("--curves", help="curve file (defaults to the bundled records)")
    p_verify.add_argument("--label", help="restrict to one label")
    p_verify.set_defaults(func=_cmd_verify)

    p_bound = sub.add_parser("bound", help="emit the divisibility certificate")
    p_bound.add_argument("--curves", help="curve file (defaults to the bundled records)")
    p_bound.add_argument("--label", required=True)
    p_bound.add_argument("--n", type=int, required=True, help="torsion level exponent")
    p_bound.add_argument("--format", choices=("text", "machine"), default="text")
    p_bound.set_defaults(func=_cmd_bound)

    p_lemmas = sub.add_parser("lemmas", help="run the enumeration suites")
    p_lemmas.add_argument("--suite", choices=("all", "matrix", "kummer", "tate", "padic"), default="all")
    p_lemmas.add_argument("--p", type=int)
    p_lemmas.add_argument("--n", type=int)
    p_lemmas.add_argument("--budget", type=int, help="enumeration element budget")
    p_lemmas.set_defaults(func=_cmd_lemmas)

    p_local = sub.add_parser("local-degree", help="local Kummer degree at the conductor prime")
    p_local.add_argument("--curves", help="curve file (defaults to the bundled records)")
    p_local.add_argument("--label", required=True)
    p_local.add_argument("--n", type=int, required=True)
    p_local.add_argument("--precision", type=int, help="relative p-adic precision (default n + 4)")
    p_local.set_defaults(func=_cmd_local_degree)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (PrecisionError, BudgetError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
