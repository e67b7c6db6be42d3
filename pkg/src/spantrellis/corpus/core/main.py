"""Corpus types: ontology schema, labeled sequences and gold alignments.

Each ontology owns one begin label per entity label plus a single end
marker. Output ids are assigned in schema order starting at 1, so blank
(id 0) stays reserved: for ontology i the begin labels come first, then
its end marker.
"""

from dataclasses import dataclass, field
from typing import Literal

from spantrellis.decoder.core.main import MarkerSchema
from spantrellis.lattice.core.main import AlignmentPath
from spantrellis.utils.errors import ConfigError, CorpusError

type SegmentPolicy = Literal["drop", "clip"]
type OrderingPolicy = Literal["outermost-first", "ontology-first"]

DEFAULT_ONTOLOGIES: tuple[tuple[str, tuple[str, ...], float], ...] = (
    ("medications", ("drug_name", "dosage", "frequency", "route"), 100.0),
    ("symptoms", ("back_pain", "headache", "cough", "fever", "nausea"), 64.0),
    ("conditions", ("diabetes", "hypertension", "asthma"), 42.0),
    ("diagnoses", ("fracture", "infection", "migraine"), 38.0),
    ("treatments", ("physiotherapy", "surgery"), 6.0),
)


@dataclass(frozen=True)
class Ontology:
    """Name, label inventory and relative frequency of one ontology."""

    name: str
    labels: tuple[str, ...]
    weight: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        if not self.name:
            raise ConfigError("Ontology name must be non-empty.")
        if not self.labels:
            raise ConfigError(f"Ontology '{self.name}' needs at least one label.")
        if len(set(self.labels)) != len(self.labels):
            raise ConfigError(f"Ontology '{self.name}' has duplicate labels: {self.labels}")
        if self.weight <= 0:
            raise ConfigError(f"Ontology '{self.name}' weight must be > 0, got {self.weight}")


@dataclass(frozen=True)
class OntologySchema:
    """Ordered ontologies and the joint output vocabulary they define.

    Attributes:
        ontologies (tuple[Ontology, ...]): Ontologies in id order.
        version (int): Schema format version.
    """

    ontologies: tuple[Ontology, ...]
    version: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "ontologies", tuple(self.ontologies))
        if not self.ontologies:
            raise ConfigError("A schema needs at least one ontology.")
        names = [o.name for o in self.ontologies]
        if len(set(names)) != len(names):
            raise ConfigError(f"Ontology names must be unique, got {names}")

    @classmethod
    def default(cls) -> "OntologySchema":
        """Five medical ontologies weighted 100:64:42:38:6."""
        return cls(ontologies=tuple(Ontology(n, labels, w) for n, labels, w in DEFAULT_ONTOLOGIES))

    def _offset(self, ontology: int) -> int:
        return 1 + sum(len(o.labels) + 1 for o in self.ontologies[:ontology])

    def begin_id(self, ontology: int, label: int) -> int:
        return self._offset(ontology) + label

    def end_id(self, ontology: int) -> int:
        return self._offset(ontology) + len(self.ontologies[ontology].labels)

    @property
    def output_vocab(self) -> int:
        """Number of real output labels (blank excluded)."""
        return sum(len(o.labels) + 1 for o in self.ontologies)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(o.weight for o in self.ontologies)

    def markers(self) -> MarkerSchema:
        """Begin/end id tables for span extraction."""
        begin: dict[int, tuple[str, str]] = {}
        end: dict[int, str] = {}
        for i, ontology in enumerate(self.ontologies):
            for j, label in enumerate(ontology.labels):
                begin[self.begin_id(i, j)] = (ontology.name, label)
            end[self.end_id(i)] = ontology.name
        return MarkerSchema(begin=begin, end=end)

    def index(self, ontology_name: str, label_name: str | None = None) -> tuple[int, int | None]:
        """Resolve names to (ontology id, label id).

        Raises:
            CorpusError: If either name is unknown.
        """
        for i, ontology in enumerate(self.ontologies):
            if ontology.name == ontology_name:
                if label_name is None:
                    return i, None
                if label_name not in ontology.labels:
                    raise CorpusError(f"Unknown label '{label_name}' for ontology '{ontology_name}'.")
                return i, ontology.labels.index(label_name)
        raise CorpusError(f"Unknown ontology '{ontology_name}'.")

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "ontologies": [
                {"name": o.name, "labels": list(o.labels), "weight": o.weight} for o in self.ontologies
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OntologySchema":
        """
        Raises:
            ConfigError: If the mapping is not a valid schema.
        """
        if not isinstance(data, dict) or "ontologies" not in data:
            raise ConfigError("Schema must be a mapping with an 'ontologies' list.")
        version = data.get("version", 1)
        if version != 1:
            raise ConfigError(f"Unsupported schema version {version}, expected 1.")
        try:
            ontologies = tuple(
                Ontology(name=o["name"], labels=tuple(o["labels"]), weight=float(o.get("weight", 1.0)))
                for o in data["ontologies"]
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"Malformed ontology entry: {exc}") from exc
        return cls(ontologies=ontologies, version=version)


@dataclass(frozen=True, order=True)
class Span:
    """An entity over tokens ``start..end`` inclusive (0-based)."""

    ontology: int
    label: int
    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start + 1

    def contains(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end

    def disjoint(self, other: "Span") -> bool:
        return self.end < other.start or other.end < self.start


@dataclass(frozen=True)
class LabeledSequence:
    """Token ids with their entity spans.

    Attributes:
        tokens (tuple[int, ...]): Word ids.
        spans (tuple[Span, ...]): Entity spans, sorted.
        source_id (str): Identifier of the conversation or segment.
    """

    tokens: tuple[int, ...]
    spans: tuple[Span, ...] = field(default_factory=tuple)
    source_id: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(int(t) for t in self.tokens))
        object.__setattr__(self, "spans", tuple(sorted(self.spans)))
        for span in self.spans:
            if not 0 <= span.start <= span.end < len(self.tokens):
                raise CorpusError(
                    f"{self.source_id}: span {span} outside [0, {len(self.tokens) - 1}]."
                )

    def __len__(self) -> int:
        return len(self.tokens)

    def check(self, schema: OntologySchema) -> None:
        """Validate labels against ``schema`` and same-ontology nesting.

        Raises:
            CorpusError: On an unknown ontology or label, or two spans of
                one ontology that cross without nesting.
        """
        n = len(schema.ontologies)
        for span in self.spans:
            if not 0 <= span.ontology < n:
                raise CorpusError(f"{self.source_id}: ontology id {span.ontology} outside [0, {n}).")
            labels = schema.ontologies[span.ontology].labels
            if not 0 <= span.label < len(labels):
                raise CorpusError(
                    f"{self.source_id}: label id {span.label} outside [0, {len(labels)}) "
                    f"for ontology '{schema.ontologies[span.ontology].name}'."
                )
        for i, a in enumerate(self.spans):
            for b in self.spans[i + 1:]:
                if a.ontology == b.ontology and not (a.disjoint(b) or a.contains(b) or b.contains(a)):
                    raise CorpusError(f"{self.source_id}: spans {a} and {b} cross within one ontology.")


@dataclass(frozen=True)
class GoldAlignment:
    """Alignment path derived from spans plus its target labels."""

    path: AlignmentPath
    targets: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.path.U != len(self.targets):
            raise CorpusError(f"Path has {self.path.U} labels but {len(self.targets)} targets were given.")


@dataclass(frozen=True)
class CorpusConfig:
    """Settings of the synthetic corpus generator.

    Attributes:
        size (int): Number of sequences.
        mean_length (float): Mean of the lognormal length distribution.
        length_sigma (float): Log-space standard deviation of lengths.
        min_length (int): Lengths are clipped to at least this.
        max_length (int): Lengths are clipped to at most this.
        span_rate (float): Expected spans per 100 tokens.
        min_span (int): Shortest span in tokens.
        max_span (int): Longest span in tokens.
        nesting_rate (float): Chance that a span is placed inside an
            existing span of its own ontology.
        overlap_rate (float): Chance that a span overlaps a span of
            another ontology.
        filler_vocab (int): Number of non-entity words.
        seed (int): Generator seed.
    """

    size: int = 100
    mean_length: float = 300.0
    length_sigma: float = 0.6
    min_length: int = 20
    max_length: int = 1600
    span_rate: float = 4.0
    min_span: int = 1
    max_span: int = 4
    nesting_rate: float = 0.2
    overlap_rate: float = 0.1
    filler_vocab: int = 200
    seed: int = 0

    def __post_init__(self) -> None:
        if self.size < 0:
            raise ConfigError(f"size must be >= 0, got {self.size}")
        if not 1 <= self.min_length <= self.max_length:
            raise ConfigError(f"Need 1 <= min_length <= max_length, got {self.min_length}, {self.max_length}")
        if not 1 <= self.min_span <= self.max_span:
            raise ConfigError(f"Need 1 <= min_span <= max_span, got {self.min_span}, {self.max_span}")
        for name in ("nesting_rate", "overlap_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {getattr(self, name)}")
        if self.mean_length <= 0 or self.length_sigma < 0 or self.span_rate < 0:
            raise ConfigError("mean_length must be > 0; length_sigma and span_rate must be >= 0.")
        if self.filler_vocab < 1:
            raise ConfigError(f"filler_vocab must be >= 1, got {self.filler_vocab}")
