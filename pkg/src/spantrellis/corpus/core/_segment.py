"""Cut random windows out of long sequences.

Training draws a fresh window from every conversation each epoch, so the
model sees different views of the same data. Spans crossing the window
boundary are dropped or clipped to it; spans outside it disappear.
"""

import numpy as np

from spantrellis.utils.errors import ConfigError

from .main import LabeledSequence, SegmentPolicy, Span


class RandomSegmenter:
    """Uniform window length in [min_len, max_len], uniform position."""

    def __init__(self, min_len: int, max_len: int, policy: SegmentPolicy = "drop") -> None:
        """
        Args:
            min_len (int): Shortest window.
            max_len (int): Longest window.
            policy (SegmentPolicy): What happens to boundary-crossing spans.

        Raises:
            ConfigError: If the range is empty or the policy is unknown.
        """
        if not 1 <= min_len <= max_len:
            raise ConfigError(f"Need 1 <= min_len <= max_len, got {min_len}, {max_len}")
        if policy not in ("drop", "clip"):
            raise ConfigError(f"Invalid segment policy: {policy}. Must be 'drop' or 'clip'.")
        self.min_len = min_len
        self.max_len = max_len
        self.policy = policy

    def cut(self, seq: LabeledSequence, rng: np.random.Generator) -> LabeledSequence:
        n = len(seq)
        if n <= self.min_len:
            return seq
        length = int(rng.integers(self.min_len, min(self.max_len, n) + 1))
        start = int(rng.integers(0, n - length + 1))
        end = start + length - 1

        spans: list[Span] = []
        for span in seq.spans:
            if span.end < start or span.start > end:
                continue
            inside = start <= span.start and span.end <= end
            if not inside and self.policy == "drop":
                continue
            spans.append(
                Span(span.ontology, span.label, max(span.start, start) - start, min(span.end, end) - start)
            )
        return LabeledSequence(
            tokens=seq.tokens[start:end + 1],
            spans=tuple(spans),
            source_id=f"{seq.source_id}@{start}:{end + 1}",
        )

    def views(self, seq: LabeledSequence, n_views: int, rng: np.random.Generator) -> list[LabeledSequence]:
        """Draw ``n_views`` independent windows of ``seq``."""
        return [self.cut(seq, rng) for _ in range(n_views)]
