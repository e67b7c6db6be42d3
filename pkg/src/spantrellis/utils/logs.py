"""Configure human-readable progress logging on stderr."""

import logging
import sys

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def configure_logging(verbosity: int = 0) -> None:
    """Install a single stderr handler on the package logger.

    Args:
        verbosity (int): 0 for WARNING, 1 for INFO, 2 or more for DEBUG.
    """
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG

    root = logging.getLogger("spantrellis")
    root.setLevel(level)
    if not any(getattr(h, "_spantrellis", False) for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._spantrellis = True  # type: ignore[attr-defined]
        root.addHandler(handler)
