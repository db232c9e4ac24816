"""Command line entry point for the benchmark harness."""

from __future__ import annotations

import argparse
import logging
import sys

from .bench import METHODS, ExperimentConfig, run
from .graph import GraphParseError, GraphValidationError

logger = logging.getLogger(__name__)


def _comma_list(cast):
    def parse(text: str):
        try:
            return tuple(cast(part) for part in text.split(",") if part)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad list value {text!r}") from None

    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="custard-bench",
        description="Run repeated-trial ranking benchmarks on a labeled graph.",
    )
    parser.add_argument("--edges", required=True, help="edge list file: <src> <dst> [weight]")
    parser.add_argument("--labels", required=True, help="label file: <node> <label>")
    parser.add_argument(
        "--methods",
        type=_comma_list(str),
        default=METHODS,
        help=f"comma-separated subset of {','.join(METHODS)} (default: all)",
    )
    parser.add_argument(
        "--gamma",
        type=_comma_list(float),
        default=(0.02, 0.05, 0.10),
        help="comma-separated seed fractions (default: 0.02,0.05,0.10)",
    )
    parser.add_argument(
        "--k",
        type=_comma_list(int),
        default=(1, 2, 3),
        help="comma-separated negative-sampling hop distances (default: 1,2,3)",
    )
    parser.add_argument(
        "--lambda",
        dest="redirection",
        type=_comma_list(float),
        default=(0.9,),
        help="comma-separated redirection strengths (default: 0.9)",
    )
    parser.add_argument("--alpha", type=float, default=0.05, help="restart probability")
    parser.add_argument("--trials", type=int, default=50, help="trials per label (default: 50)")
    parser.add_argument("--seed", type=int, default=0, help="base seed for trial construction")
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument("--workers", type=int, default=1, help="parallel trial workers")
    parser.add_argument("--dataset-name", default=None, help="dataset column value in the CSV")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    config = ExperimentConfig(
        edges_path=args.edges,
        labels_path=args.labels,
        out_path=args.out,
        methods=args.methods,
        gamma_list=args.gamma,
        k_list=args.k,
        lambda_list=args.redirection,
        alpha=args.alpha,
        n_trials=args.trials,
        base_seed=args.seed,
        workers=args.workers,
        dataset_name=args.dataset_name,
    )
    try:
        result = run(config)
    except (GraphParseError, GraphValidationError, OSError, ValueError) as exc:
        logger.error("%s", exc)
        return 1
    for reason in result.skipped:
        logger.warning("skipped: %s", reason)
    logger.info("results: %s", result.csv_path)
    logger.info("trial manifest: %s", result.manifest_path)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
