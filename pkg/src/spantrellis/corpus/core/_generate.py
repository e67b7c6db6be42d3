"""Generate synthetic conversations with nested, overlapping entity spans.

Lengths follow a clipped lognormal so most sequences sit near the mean
with a long tail. Spans are drawn one at a time: the ontology by schema
weight, the label uniformly, then a placement that either nests inside a
span of the same ontology, overlaps a span of another ontology, or keeps
clear of both. Tokens come from a lexicon where every span starts with a
cue word of its label and continues with words of its ontology, which
gives a model something to learn.
"""

import logging
import math

import numpy as np

from spantrellis.utils.errors import CorpusError

from .main import CorpusConfig, LabeledSequence, OntologySchema, Span

logger = logging.getLogger(__name__)

_PLACEMENT_ATTEMPTS = 10


class Lexicon:
    """Word-id inventory: filler words, ontology words and label cue words."""

    def __init__(self, schema: OntologySchema, filler_vocab: int, ontology_words: int = 6, cues_per_label: int = 2) -> None:
        """
        Args:
            schema (OntologySchema): Ontologies and labels to cover.
            filler_vocab (int): Number of words that never start an entity.
            ontology_words (int): Words shared by the spans of one ontology.
            cues_per_label (int): Words that open a span of one label.
        """
        self.filler_vocab = filler_vocab
        self.ontology_words = ontology_words
        self.cues_per_label = cues_per_label
        self._ontology_base: list[int] = []
        self._cue_base: list[list[int]] = []
        next_id = filler_vocab
        for ontology in schema.ontologies:
            self._ontology_base.append(next_id)
            next_id += ontology_words
            bases = []
            for _ in ontology.labels:
                bases.append(next_id)
                next_id += cues_per_label
            self._cue_base.append(bases)
        self.size = next_id

    def filler(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.integers(0, self.filler_vocab, size=n)

    def ontology_word(self, rng: np.random.Generator, ontology: int, n: int) -> np.ndarray:
        return self._ontology_base[ontology] + rng.integers(0, self.ontology_words, size=n)

    def cue(self, rng: np.random.Generator, ontology: int, label: int) -> int:
        return int(self._cue_base[ontology][label] + rng.integers(0, self.cues_per_label))


class CorpusGenerator:
    """Draw a corpus that depends only on (schema, config)."""

    def __init__(self, schema: OntologySchema, config: CorpusConfig) -> None:
        """
        Args:
            schema (OntologySchema): Ontologies, labels and weights.
            config (CorpusConfig): Size, length and span settings.
        """
        self.schema = schema
        self.config = config
        self.lexicon = Lexicon(schema, config.filler_vocab)
        weights = np.asarray(schema.weights, dtype=np.float64)
        self.ontology_p = weights / weights.sum()

    def generate(self) -> list[LabeledSequence]:
        """Return ``config.size`` sequences.

        Raises:
            CorpusError: If the shortest allowed span exceeds the shortest
                allowed sequence.
        """
        c = self.config
        if c.min_span > c.min_length:
            raise CorpusError(f"min_span {c.min_span} exceeds min_length {c.min_length}: spans cannot fit.")
        children = np.random.SeedSequence(c.seed).spawn(c.size)
        corpus = [self._sequence(np.random.default_rng(child), k) for k, child in enumerate(children)]
        logger.info(
            "generated %d sequences, %d spans",
            len(corpus), sum(len(s.spans) for s in corpus),
        )
        return corpus

    def _length(self, rng: np.random.Generator) -> int:
        c = self.config
        mu = math.log(c.mean_length) - c.length_sigma**2 / 2
        return int(np.clip(round(rng.lognormal(mu, c.length_sigma)), c.min_length, c.max_length))

    def _sequence(self, rng: np.random.Generator, index: int) -> LabeledSequence:
        n_tokens = self._length(rng)
        spans: list[Span] = []
        for _ in range(rng.poisson(self.config.span_rate * n_tokens / 100.0)):
            ontology = int(rng.choice(len(self.ontology_p), p=self.ontology_p))
            label = int(rng.integers(len(self.schema.ontologies[ontology].labels)))
            span = self._place(rng, ontology, label, n_tokens, spans)
            if span is not None:
                spans.append(span)

        tokens = self.lexicon.filler(rng, n_tokens)
        for span in sorted(spans, key=lambda s: (-s.length, s.start)):
            tokens[span.start:span.end + 1] = self.lexicon.ontology_word(rng, span.ontology, span.length)
            tokens[span.start] = self.lexicon.cue(rng, span.ontology, span.label)
        return LabeledSequence(tokens=tuple(tokens.tolist()), spans=tuple(spans), source_id=f"conv-{index:05d}")

    def _place(self, rng: np.random.Generator, ontology: int, label: int, n_tokens: int, spans: list[Span]) -> Span | None:
        c = self.config
        same = [s for s in spans if s.ontology == ontology]
        others = [s for s in spans if s.ontology != ontology]
        nest = bool(same) and rng.random() < c.nesting_rate
        overlap = bool(others) and rng.random() < c.overlap_rate

        for _ in range(_PLACEMENT_ATTEMPTS):
            if nest:
                parent = same[int(rng.integers(len(same)))]
                length = int(rng.integers(c.min_span, min(c.max_span, parent.length) + 1))
                start = int(rng.integers(parent.start, parent.end - length + 2))
            else:
                length = int(rng.integers(c.min_span, min(c.max_span, n_tokens) + 1))
                if overlap:
                    anchor = others[int(rng.integers(len(others)))]
                    low = max(0, anchor.start - length + 1)
                    high = min(anchor.end, n_tokens - length)
                    start = int(rng.integers(low, high + 1))
                else:
                    start = int(rng.integers(0, n_tokens - length + 1))
            candidate = Span(ontology, label, start, start + length - 1)
            if candidate in spans:
                continue
            if nest:
                fits = all(candidate.disjoint(s) or s.contains(candidate) or candidate.contains(s) for s in same)
            else:
                fits = all(candidate.disjoint(s) for s in same)
                if not overlap:
                    fits = fits and all(candidate.disjoint(s) for s in others)
            if fits:
                return candidate
        return None
