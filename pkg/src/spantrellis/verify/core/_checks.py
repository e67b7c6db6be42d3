"""Numerical checks of the lattice, decoder, model, corpus and metrics.

Every check draws its own random cases from the configured seed, so the
suite is reproducible and checks can be run in any order or alone.
"""

import tempfile
import time
from abc import ABC, abstractmethod
from collections import Counter
from pathlib import Path
from typing import Callable, ClassVar

import numpy as np
from scipy.stats import chisquare

from spantrellis.corpus.core._alignment import AlignmentBuilder
from spantrellis.corpus.core._generate import CorpusGenerator
from spantrellis.corpus.core._io import CorpusContainer, CorpusReader, CorpusWriter
from spantrellis.corpus.core._segment import RandomSegmenter
from spantrellis.corpus.core.main import CorpusConfig, LabeledSequence, OntologySchema
from spantrellis.decoder.main import DecodeConfig, Hypothesis, beam_search, extract_spans
from spantrellis.lattice.core._oracle import enumerated_best, enumerated_total
from spantrellis.lattice.main import (
    Constrained,
    Fixed,
    Lattice,
    LossMode,
    Unconstrained,
    backward,
    best_path,
    build_constraint_mask,
    forward,
    loss_constrained,
    loss_fixed,
    loss_gradients,
    loss_unconstrained,
    path_logprob,
)
from spantrellis.metrics.main import MetricSpan, decoded_spans, global_f1, gold_spans, local_f1
from spantrellis.model.main import ModelConfig, backprop, init_params, tree

from ._random import TableScorer, exhaustive_best, random_lattice, random_path
from .main import CHECKS, CheckResult, VerifyConfig

FD_STEP = 1e-5
ERROR_FLOOR = 1e-3


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = ERROR_FLOOR) -> float:
    """Worst elementwise |a - n| / max(|a|, |n|, floor); 0 for empty inputs.

    Entries smaller than ``floor`` in magnitude are compared absolutely.
    """
    if analytic.size == 0:
        return 0.0
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / scale))


def central_differences(f: Callable[[np.ndarray], float], w: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """Central-difference gradient of a scalar function of a flat vector."""
    grad = np.zeros_like(w)
    for i in range(w.size):
        plus, minus = w.copy(), w.copy()
        plus[i] += h
        minus[i] -= h
        grad[i] = (f(plus) - f(minus)) / (2 * h)
    return grad


class CheckBase(ABC):
    """Time a measurement and compare it with the check's threshold."""

    name: ClassVar[str]
    threshold: ClassVar[float]

    def __init__(self, config: VerifyConfig) -> None:
        self.config = config
        self.rng = np.random.default_rng([config.seed, CHECKS.index(self.name)])

    def passes(self, value: float) -> bool:
        return value <= self.threshold

    @abstractmethod
    def measure(self) -> tuple[int, float, str]:
        """Return (cases evaluated, worst value, detail)."""
        ...

    def run(self) -> CheckResult:
        start = time.perf_counter()
        cases, value, detail = self.measure()
        return CheckResult(
            check=self.name,
            passed=self.passes(value),
            cases=cases,
            value=value,
            threshold=self.threshold,
            seconds=time.perf_counter() - start,
            detail=detail,
        )


class EnumerationCheck(CheckBase):
    """Forward totals and Viterbi paths against brute force over every path."""

    name = "enumeration"
    threshold = 1e-9

    def measure(self) -> tuple[int, float, str]:
        worst_free = worst_masked = worst_best = 0.0
        for _ in range(self.config.lattices):
            T, U = int(self.rng.integers(1, 7)), int(self.rng.integers(0, 6))
            lattice = random_lattice(self.rng, T, U)
            worst_free = max(worst_free, abs(loss_unconstrained(lattice) - enumerated_total(lattice)))
            viterbi = best_path(lattice)
            worst_best = max(
                worst_best,
                abs(viterbi.score - enumerated_best(lattice)),
                abs(viterbi.score - path_logprob(lattice, viterbi.path)),
            )

            path = random_path(self.rng, T, U)
            dt, du = (int(d) for d in self.rng.integers(0, 4, size=2))
            mask = build_constraint_mask(path, dt, du)
            got = loss_constrained(lattice, path, dt, du)
            worst_masked = max(worst_masked, abs(got - enumerated_total(lattice, mask)))
        detail = f"unconstrained {worst_free:.2e}, constrained {worst_masked:.2e}, best path {worst_best:.2e}"
        return self.config.lattices, max(worst_free, worst_masked, worst_best), detail


class DualityCheck(CheckBase):
    """beta[0, 0] reproduces the forward total, with and without a mask."""

    name = "duality"
    threshold = 1e-9

    def measure(self) -> tuple[int, float, str]:
        worst = 0.0
        for _ in range(self.config.lattices):
            T, U = int(self.rng.integers(1, 31)), int(self.rng.integers(0, 21))
            lattice = random_lattice(self.rng, T, U)
            mask = build_constraint_mask(random_path(self.rng, T, U), 2, 2)
            for m in (None, mask):
                worst = max(worst, abs(backward(lattice, m)[0, 0] - forward(lattice, m).total))
        return self.config.lattices, worst, f"max |beta[0,0] - total| = {worst:.2e}"


class LossAlgebraCheck(CheckBase):
    """Zero band equals fixed, full band equals unconstrained, monotone between."""

    name = "loss-algebra"
    threshold = 1e-12

    def measure(self) -> tuple[int, float, str]:
        fixed_err = free_err = drop = 0.0
        for _ in range(self.config.algebra_cases):
            T, U = int(self.rng.integers(1, 9)), int(self.rng.integers(0, 7))
            lattice = random_lattice(self.rng, T, U)
            path = random_path(self.rng, T, U)
            sweep = [loss_constrained(lattice, path, d) for d in range(max(T, U) + 1)]
            fixed_err = max(fixed_err, abs(sweep[0] - loss_fixed(lattice, path)))
            free_err = max(free_err, abs(sweep[-1] - loss_unconstrained(lattice)))
            drop = max(drop, *(a - b for a, b in zip(sweep, sweep[1:])), 0.0)
        detail = f"delta 0 vs fixed {fixed_err:.2e}, full band vs unconstrained {free_err:.2e}, largest decrease {drop:.2e}"
        return self.config.algebra_cases, max(fixed_err, free_err, drop), detail


class LatticeGradientCheck(CheckBase):
    """Occupancy gradients against central differences of the lattice entries."""

    name = "lattice-gradients"
    threshold = 1e-5

    @staticmethod
    def _check(lattice: Lattice, mode: LossMode) -> float:
        label_size = lattice.label_logprob.size
        shape_label, shape_blank = lattice.label_logprob.shape, lattice.blank_logprob.shape

        def nll(w: np.ndarray) -> float:
            perturbed = Lattice(w[:label_size].reshape(shape_label), w[label_size:].reshape(shape_blank))
            if isinstance(mode, Unconstrained):
                return -loss_unconstrained(perturbed)
            if isinstance(mode, Fixed):
                return -loss_fixed(perturbed, mode.path)
            return -loss_constrained(perturbed, mode.path, mode.delta_t, mode.delta_u)

        grads = loss_gradients(lattice, mode)
        analytic = np.concatenate([grads.d_label.ravel(), grads.d_blank.ravel()])
        w = np.concatenate([lattice.label_logprob.ravel(), lattice.blank_logprob.ravel()])
        return relative_error(analytic, central_differences(nll, w))

    def measure(self) -> tuple[int, float, str]:
        worst: dict[str, float] = {}
        for _ in range(self.config.gradient_cases):
            T, U = int(self.rng.integers(1, 6)), int(self.rng.integers(0, 5))
            lattice = random_lattice(self.rng, T, U)
            path = random_path(self.rng, T, U)
            for mode in (Unconstrained(), Fixed(path), Constrained(path, 1, 1)):
                worst[mode.name] = max(worst.get(mode.name, 0.0), self._check(lattice, mode))
        detail = ", ".join(f"{k} {v:.2e}" for k, v in worst.items())
        return self.config.gradient_cases, max(worst.values()), detail


class PipelineGradientCheck(CheckBase):
    """Full-model gradients against central differences of every parameter."""

    name = "pipeline-gradients"
    threshold = 1e-4
    T, U, HIDDEN = 4, 2, 3
    INPUT_VOCAB, OUTPUT_VOCAB = 5, 3

    def _cases(self) -> list[tuple[str, str, str]]:
        return [
            ("transducer", "attention", "unconstrained"),
            ("transducer", "bigru", "fixed"),
            ("transducer", "attention", "constrained"),
            ("seq2seq", "bigru", "fixed"),
            ("seq2seq", "attention", "fixed"),
        ]

    def _check(self, architecture: str, encoder: str, mode_name: str) -> float:
        config = ModelConfig(
            input_vocab=self.INPUT_VOCAB,
            output_vocab=self.OUTPUT_VOCAB,
            architecture=architecture,
            encoder=encoder,
            hidden=self.HIDDEN,
            embedding=self.HIDDEN,
            layers=1,
            window=2,
            seed=int(self.rng.integers(2**31)),
            init_scale=0.5,
        )
        params = init_params(config)
        tokens = self.rng.integers(0, self.INPUT_VOCAB, size=self.T)
        targets = self.rng.integers(1, self.OUTPUT_VOCAB + 1, size=self.U)
        path = random_path(self.rng, self.T, self.U)
        mode: LossMode = {
            "unconstrained": Unconstrained(),
            "fixed": Fixed(path),
            "constrained": Constrained(path, 1, 1),
        }[mode_name]

        names = [name for name, _ in tree.named_arrays(params)]
        shapes = [a.shape for _, a in tree.named_arrays(params)]
        sizes = [a.size for _, a in tree.named_arrays(params)]

        def nll(w: np.ndarray) -> float:
            chunks = np.split(w, np.cumsum(sizes)[:-1])
            arrays = {n: c.reshape(s) for n, c, s in zip(names, chunks, shapes)}
            return -backprop(tokens, targets, mode, tree.replace_arrays(params, arrays))[0]

        _, grads = backprop(tokens, targets, mode, params)
        analytic = np.concatenate([a.ravel() for _, a in tree.named_arrays(grads)])
        w = np.concatenate([a.ravel() for _, a in tree.named_arrays(params)])
        return relative_error(analytic, central_differences(nll, w))

    def measure(self) -> tuple[int, float, str]:
        errors = {"/".join(case): self._check(*case) for case in self._cases()}
        detail = ", ".join(f"{k} {v:.2e}" for k, v in errors.items())
        return len(errors), max(errors.values()), detail


class DecoderExactnessCheck(CheckBase):
    """Infinite-beam search returns the exhaustive argmax path."""

    name = "decoder-exactness"
    threshold = 1e-9
    MAX_EXPANSION = 2

    def measure(self) -> tuple[int, float, str]:
        worst, mismatches = 0.0, 0
        config = DecodeConfig.exhaustive(self.MAX_EXPANSION)
        for _ in range(self.config.decoder_cases):
            vocab, T = int(self.rng.integers(2, 4)), int(self.rng.integers(1, 5))
            scorer = TableScorer(vocab, int(self.rng.integers(2**31)))
            top = beam_search(scorer, T, config)[0]
            score, labels, frames = exhaustive_best(scorer, T, self.MAX_EXPANSION)
            if (top.labels, top.emit_frames) != (labels, frames):
                mismatches += 1
            worst = max(worst, abs(top.score - score))
        value = np.inf if mismatches else worst
        return self.config.decoder_cases, value, f"{mismatches} path mismatches, max score error {worst:.2e}"


class RoundTripCheck(CheckBase):
    """Corpus files and span-to-alignment-to-span conversions are lossless."""

    name = "round-trips"
    threshold = 0

    def _corpus(self) -> tuple[OntologySchema, list[LabeledSequence]]:
        schema = OntologySchema.default()
        config = CorpusConfig(
            size=self.config.sequences,
            mean_length=40.0,
            min_length=5,
            max_length=120,
            span_rate=10.0,
            seed=int(self.rng.integers(2**31)),
        )
        return schema, CorpusGenerator(schema, config).generate()

    def measure(self) -> tuple[int, float, str]:
        schema, sequences = self._corpus()
        markers = schema.markers()
        span_failures = 0
        for i, seq in enumerate(sequences):
            policy = "outermost-first" if i % 2 == 0 else "ontology-first"
            gold = AlignmentBuilder(schema, policy).build(seq)
            hyp = Hypothesis(gold.targets, tuple(gold.path.emit_frames()), 0.0, None)
            extraction = extract_spans(hyp, markers, len(seq))
            if extraction.spurious or Counter(decoded_spans(extraction.spans)) != Counter(gold_spans(seq, schema)):
                span_failures += 1

        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "corpus.jsonl"
            CorpusWriter(path).write(CorpusContainer(sequences=sequences, schema=schema))
            loaded = CorpusReader(path).read()
        file_failures = sum(a != b for a, b in zip(sequences, loaded.sequences))
        file_failures += abs(len(sequences) - len(loaded.sequences))
        detail = f"{span_failures} span round-trip failures, {file_failures} corpus file failures"
        return len(sequences), span_failures + file_failures, detail


class SegmentUniformityCheck(CheckBase):
    """Segment lengths are uniform over the configured range (chi-square)."""

    name = "segment-uniformity"
    threshold = 0.01
    MIN_LEN, MAX_LEN = 40, 60

    def passes(self, value: float) -> bool:
        return value > self.threshold

    def measure(self) -> tuple[int, float, str]:
        seq = LabeledSequence(tokens=tuple(range(1000)), source_id="uniform")
        segmenter = RandomSegmenter(self.MIN_LEN, self.MAX_LEN)
        lengths = np.array([len(segmenter.cut(seq, self.rng)) for _ in range(self.config.segment_draws)])
        counts = np.bincount(lengths - self.MIN_LEN, minlength=self.MAX_LEN - self.MIN_LEN + 1)
        result = chisquare(counts)
        return self.config.segment_draws, float(result.pvalue), f"chi-square p = {result.pvalue:.4f}"


class MetricContractsCheck(CheckBase):
    """Local F1 never exceeds global F1; location mismatches score 0 / 1."""

    name = "metric-contracts"
    threshold = 0
    NAMES = (("symptoms", "back_pain"), ("symptoms", "cough"), ("medications", "drug_name"))

    def _spans(self) -> list[MetricSpan]:
        spans = []
        for _ in range(int(self.rng.integers(0, 7))):
            ontology, label = self.NAMES[int(self.rng.integers(len(self.NAMES)))]
            start = int(self.rng.integers(1, 11))
            spans.append(MetricSpan(ontology, label, start, start + int(self.rng.integers(0, 3))))
        return spans

    def measure(self) -> tuple[int, float, str]:
        violations = 0
        for _ in range(self.config.span_pairs):
            pred, gold = self._spans(), self._spans()
            if local_f1(pred, gold).f1 > global_f1(pred, gold).f1:
                violations += 1
        pred = [MetricSpan("symptoms", "back_pain", 5, 7)]
        gold = [MetricSpan("symptoms", "back_pain", 9, 11)]
        if local_f1(pred, gold).f1 != 0.0 or global_f1(pred, gold).f1 != 1.0:
            violations += 1
        return self.config.span_pairs + 1, violations, f"{violations} violations"


class CheckSelector:
    """Select the check class for a name."""

    def __init__(self, config: VerifyConfig) -> None:
        self.config = config

    def select(self, name: str) -> CheckBase:
        """
        Raises:
            ValueError: If ``name`` is not a known check.
        """
        for cls in (
            EnumerationCheck,
            DualityCheck,
            LossAlgebraCheck,
            LatticeGradientCheck,
            PipelineGradientCheck,
            DecoderExactnessCheck,
            RoundTripCheck,
            SegmentUniformityCheck,
            MetricContractsCheck,
        ):
            if cls.name == name:
                return cls(self.config)
        raise ValueError(f"Invalid check: {name}. Must be one of {list(CHECKS)}.")
