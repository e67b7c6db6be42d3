"""Turn annotated spans into a gold alignment path and target labels.

A span's begin label is emitted at its start token and its ontology's
end marker at its end token. When several labels fall on one token all
begin labels come first, then all end markers, each group sorted by the
ordering policy. Both policies put the longer of two same-ontology spans
first, which is what lets end markers close spans last-in first-out.
"""

from collections import defaultdict
from typing import Callable

from spantrellis.lattice.core.main import AlignmentPath
from spantrellis.utils.errors import CorpusError

from .main import GoldAlignment, LabeledSequence, OntologySchema, OrderingPolicy, Span


class EmissionOrder:
    """Sort key for labels emitted at the same token."""

    def __init__(self, policy: OrderingPolicy) -> None:
        self.policy = policy

    def key(self) -> Callable[[Span], tuple[int, int, int]]:
        """
        Raises:
            ValueError: If the policy is unknown.
        """
        if self.policy == "outermost-first":
            return lambda s: (-s.length, s.ontology, s.label)
        if self.policy == "ontology-first":
            return lambda s: (s.ontology, -s.length, s.label)
        raise ValueError(
            f"Invalid ordering policy: {self.policy}. "
            f"Must be 'outermost-first' or 'ontology-first'."
        )


class AlignmentBuilder:
    """Build the GoldAlignment of one labeled sequence."""

    def __init__(self, schema: OntologySchema, policy: OrderingPolicy = "outermost-first") -> None:
        """
        Args:
            schema (OntologySchema): Provides begin-label and end-marker ids.
            policy (OrderingPolicy): Order of simultaneous emissions.
        """
        self.schema = schema
        self.key = EmissionOrder(policy).key()

    def build(self, seq: LabeledSequence) -> GoldAlignment:
        """
        Raises:
            CorpusError: If the sequence is empty or its spans are invalid.
        """
        if len(seq) == 0:
            raise CorpusError(f"{seq.source_id}: cannot align an empty sequence.")
        seq.check(self.schema)

        begins: dict[int, list[Span]] = defaultdict(list)
        ends: dict[int, list[Span]] = defaultdict(list)
        for span in seq.spans:
            begins[span.start].append(span)
            ends[span.end].append(span)

        counts = [0] * len(seq)
        targets: list[int] = []
        for t in range(len(seq)):
            for span in sorted(begins[t], key=self.key):
                targets.append(self.schema.begin_id(span.ontology, span.label))
            for span in sorted(ends[t], key=self.key):
                targets.append(self.schema.end_id(span.ontology))
            counts[t] = len(begins[t]) + len(ends[t])
        return GoldAlignment(path=AlignmentPath.from_emissions(counts), targets=tuple(targets))
