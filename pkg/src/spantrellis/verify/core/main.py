"""Types of the numerical self-check suite."""

from dataclasses import dataclass
from typing import Literal

import pandas as pd

type CheckName = Literal[
    "enumeration",
    "duality",
    "loss-algebra",
    "lattice-gradients",
    "pipeline-gradients",
    "decoder-exactness",
    "round-trips",
    "segment-uniformity",
    "metric-contracts",
]
CHECKS: tuple[str, ...] = (
    "enumeration",
    "duality",
    "loss-algebra",
    "lattice-gradients",
    "pipeline-gradients",
    "decoder-exactness",
    "round-trips",
    "segment-uniformity",
    "metric-contracts",
)
RESULT_COLUMNS = ["check", "passed", "cases", "value", "threshold", "seconds", "detail"]


@dataclass(frozen=True)
class VerifyConfig:
    """Case counts of each check.

    Attributes:
        seed (int): Drives every random case.
        lattices (int): Random lattices compared against path enumeration.
        algebra_cases (int): Cases for the loss-mode identities.
        gradient_cases (int): Random lattices checked by finite differences.
        decoder_cases (int): Random scorers decoded with an infinite beam.
        sequences (int): Generated sequences for the round trips.
        segment_draws (int): Segment lengths drawn for the uniformity test.
        span_pairs (int): Random prediction/gold pairs for the F1 contracts.
    """

    seed: int = 0
    lattices: int = 200
    algebra_cases: int = 50
    gradient_cases: int = 10
    decoder_cases: int = 100
    sequences: int = 1000
    segment_draws: int = 5000
    span_pairs: int = 1000

    def __post_init__(self) -> None:
        for name in ("lattices", "algebra_cases", "gradient_cases", "decoder_cases", "sequences", "segment_draws", "span_pairs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")

    @classmethod
    def quick(cls, seed: int = 0) -> "VerifyConfig":
        """A reduced suite for smoke runs."""
        return cls(
            seed=seed,
            lattices=20,
            algebra_cases=10,
            gradient_cases=2,
            decoder_cases=10,
            sequences=50,
            segment_draws=2000,
            span_pairs=100,
        )


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one check.

    Attributes:
        check (str): Check name.
        passed (bool): Verdict.
        cases (int): Number of cases evaluated.
        value (float): Worst error, violation count or p-value, depending
            on the check.
        threshold (float): Bound ``value`` is compared against.
        seconds (float): Wall time.
        detail (str): Human-readable summary.
    """

    check: str
    passed: bool
    cases: int
    value: float
    threshold: float
    seconds: float
    detail: str


@dataclass(frozen=True)
class VerifyReport:
    results: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def to_frame(self) -> pd.DataFrame:
        rows = [[getattr(r, c) for c in RESULT_COLUMNS] for r in self.results]
        return pd.DataFrame(rows, columns=RESULT_COLUMNS)
