"""Command-line entry point: python -m src.cli {u3,u2} cohomology | current | selftest."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from src.config import Settings, get_settings
from src.current_conformal import current_cohomology_table, load_algebra
from src.exact_linalg import StructuralError
from src.kernel_cohomology import cohomology_table
from src.reporting import OUTPUT_FORMATS, CohomologyReport, diff_reports, render, write_report
from src.rewrite_core import family_by_name
from src.selftest import SUITES, run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

METHODS = ("closed", "paths", "both")


@dataclass(frozen=True)
class RunConfig:
    target: str
    n_max: int
    deg_max: int
    method: str = "closed"
    prune_zeros: bool = True
    out: str = "table"
    output_file: Optional[Path] = None
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.n_max < 1 or self.deg_max < 1:
            raise ValueError("--n-max and --deg-max must be at least 1")
        if self.jobs < 1:
            raise ValueError("--jobs must be at least 1")


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {value!r}") from None
    if number < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return number


def _add_output_args(parser: argparse.ArgumentParser, settings: Settings) -> None:
    parser.add_argument("--out", choices=OUTPUT_FORMATS, default="table")
    parser.add_argument("--output-file", type=Path, default=None)
    parser.add_argument("--jobs", type=_positive_int, default=settings.jobs)


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m src.cli",
        description="Hochschild cohomology of the conformal algebras U(2), U(3) and Cur A.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    for family in ("u3", "u2"):
        family_parser = commands.add_parser(family, help=f"computations for {family.upper()}")
        actions = family_parser.add_subparsers(dest="action", required=True)
        coh = actions.add_parser("cohomology", help="per-degree cohomology table")
        coh.add_argument("--n-max", type=_positive_int, default=settings.n_max)
        coh.add_argument("--deg-max", type=_positive_int, default=settings.deg_max)
        coh.add_argument("--method", choices=METHODS, default="closed")
        coh.add_argument(
            "--no-prune-zeros",
            dest="prune_zeros",
            action="store_false",
            default=settings.prune_zeros,
        )
        _add_output_args(coh, settings)

    current = commands.add_parser("current", help="cohomology of a current conformal algebra")
    current.add_argument("--algebra", required=True, help="builtin:mat:k | builtin:truncpoly:N | path.json")
    current.add_argument("--n-max", type=_positive_int, default=3)
    current.add_argument("--deg-max", type=_positive_int, default=3)
    _add_output_args(current, settings)

    selftest = commands.add_parser("selftest", help="run invariant suites")
    selftest.add_argument("--suite", choices=SUITES, default="all")
    selftest.add_argument("--out", choices=("table", "json"), default="table")
    return parser


def _emit(config: RunConfig, report: CohomologyReport) -> None:
    text = render(report, config.out)
    if config.output_file is None:
        sys.stdout.write(text)
    else:
        path = write_report(config.output_file, text)
        logger.info("report written to %s", path)


def cmd_cohomology(config: RunConfig) -> int:
    f = family_by_name(config.target)
    opts = dict(prune_zeros=config.prune_zeros, jobs=config.jobs)
    if config.method == "both":
        report = cohomology_table(f, config.n_max, config.deg_max, method="closed", derivation="fast", **opts)
        other = cohomology_table(f, config.n_max, config.deg_max, method="paths", derivation="general", **opts)
        problems = diff_reports(report, other)
        if problems:
            sys.stderr.write("closed-form and path pipelines disagree:\n" + "\n".join(problems) + "\n")
            return EXIT_CHECK_FAILED
    else:
        report = cohomology_table(f, config.n_max, config.deg_max, method=config.method, **opts)
    _emit(config, report)
    return EXIT_OK


def cmd_current(config: RunConfig) -> int:
    algebra = load_algebra(config.target)
    report = current_cohomology_table(algebra, config.n_max, config.deg_max, jobs=config.jobs)
    _emit(config, report)
    return EXIT_OK


def cmd_selftest(suite: str, out: str = "table") -> int:
    report = run_suite(suite)
    if out == "json":
        sys.stdout.write(json.dumps(report.as_dict(), indent=2) + "\n")
    else:
        sys.stdout.write(report.render())
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def main(argv: Optional[List[str]] = None) -> int:
    settings = get_settings()
    parser = build_parser(settings)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(
        level=settings.logging_level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    if args.command == "selftest":
        return cmd_selftest(args.suite, args.out)

    try:
        if args.command == "current":
            config = RunConfig(args.algebra, args.n_max, args.deg_max, out=args.out,
                               output_file=args.output_file, jobs=args.jobs)
            return cmd_current(config)
        config = RunConfig(
            args.command,
            args.n_max,
            args.deg_max,
            method=args.method,
            prune_zeros=args.prune_zeros,
            out=args.out,
            output_file=args.output_file,
            jobs=args.jobs,
        )
        return cmd_cohomology(config)
    except StructuralError as exc:
        logger.error("internal consistency failure: %s", exc)
        return EXIT_CHECK_FAILED
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
