"""Read and write corpora as JSON lines and ontology schemas as YAML.

The first line of a corpus file is a header record:

    {"format": "spantrellis-corpus", "version": 1, "schema": {...} | null,
     "input_vocab": int | null, "pseudo_labeled": bool}

Every further line is one sequence:

    {"source_id": str, "tokens": [int],
     "spans": [{"ontology": int, "label": int, "start": int, "end": int}]}

An empty file is an empty corpus.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from spantrellis.utils.errors import ConfigError, CorpusError

from .main import LabeledSequence, OntologySchema, Span

logger = logging.getLogger(__name__)

FORMAT = "spantrellis-corpus"
VERSION = 1


@dataclass(frozen=True)
class CorpusContainer:
    """Sequences of one corpus file together with its header fields."""

    sequences: list[LabeledSequence] = field(default_factory=list)
    schema: OntologySchema | None = None
    input_vocab: int | None = None
    pseudo_labeled: bool = False


class CorpusWriter:
    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)

    def write(self, corpus: CorpusContainer) -> Path:
        header = {
            "format": FORMAT,
            "version": VERSION,
            "schema": corpus.schema.to_dict() if corpus.schema else None,
            "input_vocab": corpus.input_vocab,
            "pseudo_labeled": corpus.pseudo_labeled,
        }
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("w", encoding="utf-8") as fout:
            fout.write(json.dumps(header, sort_keys=True) + "\n")
            for seq in corpus.sequences:
                record = {
                    "source_id": seq.source_id,
                    "tokens": list(seq.tokens),
                    "spans": [
                        {"ontology": s.ontology, "label": s.label, "start": s.start, "end": s.end}
                        for s in seq.spans
                    ],
                }
                fout.write(json.dumps(record, sort_keys=True) + "\n")
        logger.info("wrote %d sequences to %s", len(corpus.sequences), self.path)
        return self.path


class CorpusReader:
    """Parse a corpus file, reporting the line of the first bad record."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)

    def _header(self, record: dict, line: int) -> dict:
        if record.get("format") != FORMAT:
            raise CorpusError(f"expected a '{FORMAT}' header record", line=line)
        if record.get("version") != VERSION:
            raise CorpusError(f"unsupported corpus version {record.get('version')}, expected {VERSION}", line=line)
        return record

    def _sequence(self, record: dict, line: int) -> LabeledSequence:
        try:
            spans = tuple(
                Span(int(s["ontology"]), int(s["label"]), int(s["start"]), int(s["end"]))
                for s in record.get("spans", [])
            )
            return LabeledSequence(
                tokens=tuple(int(t) for t in record["tokens"]),
                spans=spans,
                source_id=str(record.get("source_id", f"line-{line}")),
            )
        except CorpusError as exc:
            raise CorpusError(str(exc), line=line) from exc
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusError(f"malformed sequence record: {exc!r}", line=line) from exc

    def read(self) -> CorpusContainer:
        """
        Raises:
            CorpusError: On invalid JSON, a missing or wrong header, or a
                malformed sequence; the message starts with the line number.
        """
        header: dict | None = None
        sequences: list[LabeledSequence] = []
        with self.path.open(encoding="utf-8") as fin:
            for line, text in enumerate(fin, start=1):
                if not text.strip():
                    continue
                try:
                    record = json.loads(text)
                except json.JSONDecodeError as exc:
                    raise CorpusError(f"invalid JSON: {exc.msg}", line=line) from exc
                if not isinstance(record, dict):
                    raise CorpusError("record is not a JSON object", line=line)
                if header is None:
                    header = self._header(record, line)
                else:
                    sequences.append(self._sequence(record, line))
        if header is None:
            return CorpusContainer()

        schema = OntologySchema.from_dict(header["schema"]) if header.get("schema") else None
        if schema is not None:
            for seq in sequences:
                seq.check(schema)
        return CorpusContainer(
            sequences=sequences,
            schema=schema,
            input_vocab=header.get("input_vocab"),
            pseudo_labeled=bool(header.get("pseudo_labeled", False)),
        )


class SchemaFile:
    """Ontology schema stored as YAML."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)

    def read(self) -> OntologySchema:
        """
        Raises:
            ConfigError: If the file is not valid YAML or not a valid schema.
        """
        try:
            data = yaml.safe_load(self.path.read_text(encoding="utf-8"))
        except yaml.YAMLError as exc:
            raise ConfigError(f"{self.path}: invalid YAML: {exc}") from exc
        return OntologySchema.from_dict(data)

    def write(self, schema: OntologySchema) -> Path:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(yaml.safe_dump(schema.to_dict(), sort_keys=False), encoding="utf-8")
        return self.path
