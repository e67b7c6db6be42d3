"""Load or generate the corpora a run trains and evaluates on."""

import dataclasses
import logging
from dataclasses import dataclass

import numpy as np

from spantrellis.corpus.core._generate import CorpusGenerator
from spantrellis.corpus.core._io import CorpusContainer, CorpusReader, SchemaFile
from spantrellis.corpus.core.main import LabeledSequence, OntologySchema
from spantrellis.utils.errors import CorpusError

from .main import ExperimentConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PreparedData:
    """Schema, splits and the input vocabulary size covering all of them."""

    schema: OntologySchema
    labeled: list[LabeledSequence]
    unlabeled: list[LabeledSequence]
    test: list[LabeledSequence]
    input_vocab: int


class DataPreparer:
    """Read corpus files named by the config, generating missing splits."""

    def __init__(self, config: ExperimentConfig) -> None:
        self.config = config

    def _schema(self, labeled: CorpusContainer | None) -> OntologySchema:
        if self.config.schema:
            return SchemaFile(self.config.schema).read()
        if labeled is not None and labeled.schema is not None:
            return labeled.schema
        return OntologySchema.default()

    def prepare(self) -> PreparedData:
        """
        Raises:
            CorpusError: If a corpus file is malformed or a labeled
                sequence does not fit the schema.
        """
        c = self.config
        files = {
            name: CorpusReader(path).read() if path else None
            for name, path in (("labeled", c.labeled), ("unlabeled", c.unlabeled), ("test", c.test))
        }
        schema = self._schema(files["labeled"])
        generator_vocab = None

        seeds = np.random.SeedSequence(c.seed).spawn(4)[1:]
        sizes = {"labeled": c.data.labeled_size, "unlabeled": c.data.unlabeled_size, "test": c.data.test_size}
        splits: dict[str, list[LabeledSequence]] = {}
        for (name, container), seed in zip(files.items(), seeds):
            if container is not None:
                splits[name] = container.sequences
                continue
            corpus_config = dataclasses.replace(
                c.data.corpus, size=sizes[name], seed=int(seed.generate_state(1)[0])
            )
            generator = CorpusGenerator(schema, corpus_config)
            generator_vocab = generator.lexicon.size
            splits[name] = generator.generate()
            logger.info("generated %s split: %d sequences", name, len(splits[name]))

        for seq in splits["labeled"] + splits["test"]:
            seq.check(schema)

        vocab_sizes = [generator_vocab or 0]
        vocab_sizes += [f.input_vocab or 0 for f in files.values() if f is not None]
        vocab_sizes += [max(s.tokens, default=-1) + 1 for split in splits.values() for s in split]
        input_vocab = max(vocab_sizes)
        if input_vocab < 1:
            raise CorpusError("No tokens found: cannot size the input vocabulary.")
        return PreparedData(
            schema=schema,
            labeled=splits["labeled"],
            unlabeled=splits["unlabeled"],
            test=splits["test"],
            input_vocab=input_vocab,
        )
