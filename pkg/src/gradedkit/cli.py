"""
Command-line front-end.

    gradedkit <verify|ce|normalize|convert|dirac|transfer> <file> [<file2>]
              [--mode strict|sampled] [--seed N] [--samples N] [--format json|text]

Exit codes: 0 when the report passes, 1 when it fails, 2 for usage and input errors.
"""

import argparse
import logging
import sys
from typing import Sequence

from gradedkit._internal.commands import COMMANDS, CommandOptions, run_command
from gradedkit._internal.config import configure, override
from gradedkit._internal.dsl.document import load_document
from gradedkit._internal.errors import GradedKitError
from gradedkit._internal.report import FORMATS, emit_report

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gradedkit", description="Exact verification of graded geometric structures")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("file", help="structure document (.gk)")
    parser.add_argument("file2", nargs="?", help="companion document for binary commands")
    parser.add_argument("--mode", choices=("strict", "sampled"), help="nondegeneracy mode (default: strict)")
    parser.add_argument("--seed", type=int, help="seed for sample points (default: GRADEDKIT_SEED or 0)")
    parser.add_argument("--samples", type=int, help="pseudorandom sample points besides the origin (default: 8)")
    parser.add_argument("--format", choices=FORMATS, default="json")
    parser.add_argument("--roundtrip", action="store_true", help="convert: convert back and report the difference")
    parser.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    parser.add_argument("--verbose", "-v", action="store_true", help="log progress at INFO level")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        configure()
        override(seed=args.seed, samples=args.samples, mode=args.mode)
        doc = load_document(args.file)
        companion = load_document(args.file2) if args.file2 else None
        options = CommandOptions(mode=args.mode, roundtrip=args.roundtrip)
        report = run_command(args.command, doc, companion, options)
    except (GradedKitError, ValueError, OSError) as exc:
        sys.stderr.write(f"gradedkit: {exc}\n")
        return EXIT_USAGE

    sys.stdout.buffer.write(emit_report(report, args.format, args.timings))
    sys.stdout.flush()
    return EXIT_PASS if report.verdict.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
