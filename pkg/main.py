"""
Privacy-Constrained Signal Toolkit
Main Entry Point
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from config import AppConfig
from cli.commands import (
    cmd_check_dominance,
    cmd_frontier,
    cmd_min_extension,
    cmd_plot_data,
    cmd_synthesize,
    cmd_verify,
    exit_code,
)
from data.codec import ResultFile

logger = logging.getLogger(__name__)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive digit count, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--decimals",
        nargs="?",
        type=_positive_int,
        const=AppConfig.DECIMAL_DIGITS,
        default=None,
        metavar="N",
        help="add decimal renderings with N significant digits next to the exact values",
    )
    common.add_argument("--output", type=Path, default=None, help="write the result here instead of stdout")
    common.add_argument("--show-config", action="store_true", help="print the configuration summary to stderr")
    parser = argparse.ArgumentParser(
        prog="privsig",
        description="Exact Blackwell comparisons, privacy frontiers and undominated privacy-constrained signals.",
    )
    verbs = parser.add_subparsers(dest="verb", required=True)

    p = verbs.add_parser("check-dominance", parents=[common], help="Blackwell-compare two belief payloads")
    p.add_argument("problem", type=Path)
    p.add_argument("--first", default="gamma")
    p.add_argument("--second", default="gamma_b")

    p = verbs.add_parser("min-extension", parents=[common], help="minimum-informative extension of gamma")
    p.add_argument("problem", type=Path)
    p.add_argument("--mode", choices=["one", "vertices"], default="one")

    p = verbs.add_parser("frontier", parents=[common], help="frontier support and a canonical frontier gamma")
    p.add_argument("problem", type=Path)

    p = verbs.add_parser("synthesize", parents=[common], help="build and verify the composite signal for a frontier gamma")
    p.add_argument("problem", type=Path)
    p.add_argument("--extension-index", type=int, default=0)
    p.add_argument("--reorder", type=Path, default=None, metavar="FILE")

    p = verbs.add_parser("verify", parents=[common], help="run the invariant suite on a payload")
    p.add_argument("problem", type=Path)
    p.add_argument("--artifact", choices=["gamma", "tau", "composite"], default="gamma")

    p = verbs.add_parser("plot-data", parents=[common], help="CSV of posterior coordinates and weights")
    p.add_argument("problem", type=Path)
    p.add_argument("--artifact", choices=["gamma", "gamma_b", "tau", "composite"], default="gamma")
    return parser


def dispatch(args: argparse.Namespace) -> ResultFile:
    if args.verb == "check-dominance":
        return cmd_check_dominance(args.problem, args.first, args.second, decimals=args.decimals)
    if args.verb == "min-extension":
        return cmd_min_extension(args.problem, args.mode, decimals=args.decimals)
    if args.verb == "frontier":
        return cmd_frontier(args.problem, decimals=args.decimals)
    if args.verb == "synthesize":
        return cmd_synthesize(args.problem, args.extension_index, args.reorder, decimals=args.decimals)
    if args.verb == "verify":
        return cmd_verify(args.problem, args.artifact, decimals=args.decimals)
    return cmd_plot_data(args.problem, args.artifact, decimals=args.decimals)


def render(args: argparse.Namespace, result: ResultFile) -> str:
    if args.verb == "plot-data" and result.status == "ok":
        return result.payload["csv"]
    return result.to_json()


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the toolkit; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        AppConfig.validate()
    except ValueError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return 2

    logging.basicConfig(
        level=AppConfig.LOG_LEVEL,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    if args.show_config:
        print(AppConfig.get_summary(), file=sys.stderr)

    result = dispatch(args)
    text = render(args, result)
    if args.output:
        args.output.write_text(text, encoding="utf-8")
        logger.info("wrote %s", args.output)
    else:
        sys.stdout.write(text)
    return exit_code(result)


if __name__ == "__main__":
    sys.exit(main())
