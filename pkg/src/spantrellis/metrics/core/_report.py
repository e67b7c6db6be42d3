"""Tabulate match results per ontology with an Overall row first."""

import json
from pathlib import Path

import pandas as pd

from .main import Average, MatchCounts, SpanMatchResult

REPORT_COLUMNS = ["ontology", "tp", "fp", "fn", "precision", "recall", "f1"]
OVERALL = "Overall"


class OntologyReportFactory:
    """Build the per-ontology table of one SpanMatchResult."""

    def __init__(self, result: SpanMatchResult, average: Average = "micro") -> None:
        """
        Args:
            result (SpanMatchResult): Pooled match counts.
            average (Average): How the Overall scores are aggregated.

        Raises:
            ValueError: If ``average`` is unknown.
        """
        if average not in ("micro", "macro"):
            raise ValueError(f"Invalid average: {average}. Must be 'micro' or 'macro'.")
        self.result = result
        self.average = average

    @staticmethod
    def _row(name: str, c: MatchCounts) -> dict:
        return {
            "ontology": name, "tp": c.tp, "fp": c.fp, "fn": c.fn,
            "precision": c.precision, "recall": c.recall, "f1": c.f1,
        }

    def build(self) -> pd.DataFrame:
        per_ontology = self.result.by_ontology()
        rows = [self._row(name, c) for name, c in per_ontology.items()]
        overall = self._row(OVERALL, self.result.total)
        if self.average == "macro" and rows:
            for metric in ("precision", "recall", "f1"):
                overall[metric] = sum(r[metric] for r in rows) / len(rows)
        return pd.DataFrame([overall, *rows], columns=REPORT_COLUMNS)


class ReportWriter:
    """Write a report table as CSV or JSON with the fixed column order."""

    def __init__(self, table: pd.DataFrame) -> None:
        self.table = table[REPORT_COLUMNS]

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.table.to_csv(path, index=False, float_format="%.6f")
        return path

    def to_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        records = self.table.to_dict(orient="records")
        path.write_text(json.dumps({"columns": REPORT_COLUMNS, "rows": records}, indent=2), encoding="utf-8")
        return path
