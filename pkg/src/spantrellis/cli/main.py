"""Command-line entry point: ``spantrellis <command> [options]``."""

import argparse
import logging

from spantrellis import __version__
from spantrellis.trainer.main import EXPERIMENTS, load_config
from spantrellis.utils.logs import configure_logging
from spantrellis.verify.main import CHECKS

from .core._commands import CommandSelector
from .core.main import EXIT_CODES, exit_code

logger = logging.getLogger(__name__)

__all__ = ["EXIT_CODES", "build_parser", "main"]


def _common(parser: argparse.ArgumentParser, command: str) -> None:
    parser.add_argument("--config", default=None, help="YAML experiment config; defaults apply when omitted.")
    parser.add_argument("--out", default=f"runs/{command}", help="Output directory (default: %(default)s).")
    parser.add_argument("--seed", type=int, default=None, help="Override the config seed.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for debug.")


def _model_inputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--checkpoint", required=True, help="Trained model checkpoint.")
    parser.add_argument("--input", required=True, help="Corpus file (JSON lines).")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spantrellis",
        description="Alignment-lattice losses and span decoding for nested entity recognition.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    gen = sub.add_parser("gen-data", help="Generate a synthetic nested-entity corpus.")
    gen.add_argument("--size", type=int, default=None, help="Number of sequences.")
    gen.add_argument("--name", default="corpus", help="Corpus file stem (default: %(default)s).")
    _common(gen, "gen-data")

    _common(sub.add_parser("train", help="Train one model."), "train")

    for name, help_ in (("decode", "Beam-decode a corpus."), ("pseudo-label", "Label a corpus with a trained model.")):
        command = sub.add_parser(name, help=help_)
        _model_inputs(command)
        _common(command, name)

    evaluate = sub.add_parser("eval", help="Decode a gold corpus and report span F1.")
    _model_inputs(evaluate)
    evaluate.add_argument("--average", choices=("micro", "macro"), default="micro")
    _common(evaluate, "eval")

    experiment = sub.add_parser("experiment", help="Run a scripted loss experiment.")
    experiment.add_argument("experiment", choices=EXPERIMENTS)
    _common(experiment, "experiment")

    verify = sub.add_parser("verify", help="Run the numerical self-checks.")
    verify.add_argument("--quick", action="store_true", help="Reduced case counts.")
    verify.add_argument("--check", action="append", choices=CHECKS, help="Run only this check (repeatable).")
    _common(verify, "verify")
    return parser


def main(argv: list[str] | None = None) -> int:
    """Parse ``argv``, run the command and return its exit code.

    Usage errors exit with 2 from argparse itself.
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        overrides = {} if args.seed is None else {"seed": args.seed}
        config = load_config(args.config, overrides)
        return CommandSelector(args, config).select(args.command).run()
    except Exception as exc:
        code = exit_code(exc)
        if code is None:
            raise
        logger.error("%s: %s", type(exc).__name__, exc)
        return code


if __name__ == "__main__":
    raise SystemExit(main())
