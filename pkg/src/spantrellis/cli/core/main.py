"""Subcommand names and the error-to-exit-code mapping."""

from typing import Literal

from spantrellis.utils.errors import (
    ConfigError,
    ContractViolation,
    CorpusError,
    CriterionFailure,
    NoAdmissiblePathError,
    TrainingDivergedError,
)

type CommandName = Literal["gen-data", "train", "decode", "eval", "pseudo-label", "experiment", "verify"]
COMMANDS: tuple[str, ...] = ("gen-data", "train", "decode", "eval", "pseudo-label", "experiment", "verify")
RESOLVED_CONFIG = "resolved_config.yaml"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_DATA = 4
EXIT_NUMERICAL = 5
EXIT_CRITERION = 6

# Checked in order; ConfigError and CorpusError must precede their ValueError kin.
EXIT_CODES: tuple[tuple[type[BaseException] | tuple[type[BaseException], ...], int], ...] = (
    (CriterionFailure, EXIT_CRITERION),
    (ConfigError, EXIT_CONFIG),
    ((TrainingDivergedError, NoAdmissiblePathError), EXIT_NUMERICAL),
    ((CorpusError, ContractViolation, OSError), EXIT_DATA),
)


def exit_code(exc: BaseException) -> int | None:
    """Exit code for a handled error, None for anything unexpected."""
    for classes, code in EXIT_CODES:
        if isinstance(exc, classes):
            return code
    return None
