"""
Command-line entry point.

    python -m cli full-pipeline --config configs/binary_normal.json --out runs/binary

Exit status: 0 clean, 2 invalid configuration or input, 3 numerical failure, any flagged
diagnostic or an unexpected error. A run that fails midway still writes its manifest.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from common.errors import IdlabError, InputError, NumericalError
from numerics.regularization import parse_strategy
from .output_handler import OutputHandler
from .run_config import EXPERIMENTS, RunConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="idlab", description="Identification lab for semiparametric discrete-outcome models")
    commands = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        sub = commands.add_parser(name)
        sub.add_argument("--config", required=True, help="JSON run configuration")
        sub.add_argument("--out", default=None, help="output directory (overrides the config)")
        sub.add_argument("--seed", type=int, default=None, help="seed for the simulated-sample path")
        sub.add_argument("--reg", default=None, help="tsvd:THRESH or tikhonov:LAMBDA")
        sub.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    """Read the JSON document, default the experiment to the command, apply flag overrides."""
    with open(args.config, "r", encoding="utf-8") as f:
        document = json.load(f)
    document.setdefault("experiment", args.command)
    config = RunConfig.model_validate(document)
    regularization = parse_strategy(args.reg) if args.reg else None
    return config.with_overrides(experiment=args.command, output_dir=args.out, seed=args.seed,
                                 regularization=regularization)


def _abort(analyzer, error: BaseException, code: int) -> int:
    """Flag the error and write whatever the run produced so far."""
    analyzer.flags.append(type(error).__name__)
    try:
        analyzer.write_manifest(exit_status=code)
    except OSError as e:
        logger.error("Could not write the partial manifest: %s", e)
    return code


def main(argv: Optional[List[str]] = None) -> int:
    # analyzer imports cli submodules
    from analyzer import Analyzer

    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        config = load_config(args)
    except (OSError, json.JSONDecodeError, ValidationError, InputError) as e:
        print(f"invalid configuration: {e}", file=sys.stderr)
        return EXIT_INPUT

    try:
        output = OutputHandler(config.output_dir)
    except OSError as e:
        print(f"output directory unusable: {e}", file=sys.stderr)
        return EXIT_INPUT
    analyzer = Analyzer(config, output)

    try:
        analyzer.run()
    except (InputError, ValidationError) as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return _abort(analyzer, e, EXIT_INPUT)
    except (NumericalError, IdlabError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return _abort(analyzer, e, EXIT_NUMERICAL)
    except Exception as e:
        logger.exception("Unexpected failure in %s", config.experiment)
        print(f"unexpected failure: {type(e).__name__}: {e}", file=sys.stderr)
        return _abort(analyzer, e, EXIT_NUMERICAL)

    analyzer.write_manifest()
    output.print_save_summary()
    if analyzer.flags:
        print(f" Flags: {', '.join(analyzer.flags)}", file=sys.stderr)
    return analyzer.exit_status()


if __name__ == "__main__":
    sys.exit(main())
