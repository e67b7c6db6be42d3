"""Domain errors raised across spantrellis.

Every error derives from a builtin exception class so callers that only
care about the broad category (bad value, numerical failure) can keep
catching ValueError or ArithmeticError. The CLI maps each class to a
distinct exit code.
"""


class ContractViolation(ValueError):
    """Raised when an operation receives inputs outside its contract."""


class NoAdmissiblePathError(ArithmeticError):
    """Raised when a loss is -inf and gradients are requested."""


class ConfigError(ValueError):
    """Raised when a configuration file or object fails validation."""


class CorpusError(ValueError):
    """Raised for malformed corpus data or infeasible generation settings.

    Attributes:
        line (int | None): 1-based line number of the offending record, when
            the error comes from a corpus file.
    """

    def __init__(self, message: str, line: int | None = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class TrainingDivergedError(FloatingPointError):
    """Raised when the training loss stops being finite.

    Attributes:
        step (int): Optimizer step at which the non-finite loss appeared.
    """

    def __init__(self, step: int, loss: float) -> None:
        super().__init__(f"loss became {loss!r} at step {step}")
        self.step = step
        self.loss = loss


class CriterionFailure(RuntimeError):
    """Raised when an experiment's acceptance criterion does not hold.

    Attributes:
        criterion (str): Name of the failed criterion.
    """

    def __init__(self, criterion: str, detail: str) -> None:
        super().__init__(f"criterion '{criterion}' failed: {detail}")
        self.criterion = criterion
