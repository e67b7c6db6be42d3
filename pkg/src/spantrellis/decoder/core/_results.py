"""Write decode results as JSON lines.

One object per decoded sequence:

    {"source_id": str, "frames": int, "score": float,
     "labels": [int], "emit_frames": [int],
     "spans": [{"ontology", "label", "start_frame", "end_frame", "closed"}],
     "spurious_markers": [{"ontology", "frame"}]}
"""

import json
from dataclasses import asdict, dataclass
from pathlib import Path

from .main import Hypothesis, SpanExtraction


@dataclass(frozen=True)
class DecodeResult:
    """Best hypothesis of one sequence with its spans."""

    source_id: str
    frames: int
    hypothesis: Hypothesis
    extraction: SpanExtraction

    def to_record(self) -> dict:
        return {
            "source_id": self.source_id,
            "frames": self.frames,
            "score": float(self.hypothesis.score),
            "labels": list(self.hypothesis.labels),
            "emit_frames": list(self.hypothesis.emit_frames),
            "spans": [asdict(span) for span in self.extraction.spans],
            "spurious_markers": [asdict(m) for m in self.extraction.spurious],
        }


class DecodeResultWriter:
    """Serialize decode results, one JSON object per line."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)

    def write(self, results: list[DecodeResult]) -> Path:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("w", encoding="utf-8") as fout:
            for result in results:
                fout.write(json.dumps(result.to_record(), sort_keys=True) + "\n")
        return self.path
