"""Command-line front end: run one verification suite and write its report.

Exit status: 0 all checks pass, 1 a check failed, 2 usage or configuration
error, 3 quadrature did not converge.
"""

from __future__ import annotations

import argparse
import ast
import inspect
import logging
import sys
from pathlib import Path

from .lfun import CoefficientError
from .quadrature import QuadratureError
from .suites import SUITES

log = logging.getLogger("symsq")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ORACLE = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def _parse_value(text: str):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def _pairs(items, what: str) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise UsageError(f"{what} must look like key=value, got {item!r}")
        out[key.strip()] = _parse_value(val.strip())
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="symsq", description="Run a numerical verification suite.")
    ap.add_argument("--suite", required=True, choices=sorted(SUITES))
    ap.add_argument("--out", help="report path (default: stdout)")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--param", action="append", metavar="K=V", help="suite parameter override (repeatable)")
    ap.add_argument("--coeff-file", help="coefficient table file")
    ap.add_argument("--tolerance", action="append", metavar="K=V", help="tolerance override (repeatable)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _kwargs(args) -> dict:
    suite = SUITES[args.suite]
    accepted = set(inspect.signature(suite.func).parameters) - {"_", "coeff_file", "seed"}
    params = _pairs(args.param, "--param")
    tols = _pairs(args.tolerance, "--tolerance")
    for key, val in tols.items():
        if not isinstance(val, (int, float)) or val <= 0:
            raise UsageError(f"tolerance {key} must be a positive number")
    kw = {**params, **tols}
    unknown = sorted(set(kw) - accepted)
    if unknown:
        raise UsageError(f"unknown setting(s) for {args.suite}: {', '.join(unknown)}; known: {', '.join(sorted(accepted))}")
    if args.coeff_file:
        if not suite.uses_table:
            raise UsageError(f"{args.suite} takes no coefficient file")
        path = Path(args.coeff_file)
        if not path.is_file():
            raise UsageError(f"coefficient file not found: {args.coeff_file}")
        kw["coeff_file"] = str(path)
    if suite.uses_seed:
        kw["seed"] = args.seed
    return kw


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        kw = _kwargs(args)
        log.info("running %s with %s", args.suite, kw)
        report = SUITES[args.suite].func(**kw)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CoefficientError, FileNotFoundError) as exc:
        print(f"error: coefficient data: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureError as exc:
        print(f"error: quadrature: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except (TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    # timings vary run to run; keep them out of the written report
    report.settings.pop("seconds", None)
    text = report.to_json() if args.format == "json" else report.to_csv()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    for row in report.failures():
        log.warning("FAIL %s %s", row.check_id, row.params_json())
    return EXIT_OK if report.passed else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
