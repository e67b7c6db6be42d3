from dataclasses import replace

import numpy as np
import pytest

from spantrellis.corpus.main import (
    CorpusConfig,
    CorpusContainer,
    LabeledSequence,
    Ontology,
    OntologySchema,
    Span,
    generate_corpus,
    input_vocab,
    load_corpus,
    load_schema,
    random_segment,
    save_corpus,
    save_schema,
    segmented_views,
    spans_to_alignment,
)
from spantrellis.utils.errors import ConfigError, CorpusError


def test_default_schema_ids(schema):
    assert schema.output_vocab == 22
    assert [schema.begin_id(0, j) for j in range(4)] == [1, 2, 3, 4]
    assert schema.end_id(0) == 5
    assert schema.begin_id(1, 0) == 6
    assert schema.end_id(4) == 22
    assert schema.index("symptoms", "back_pain") == (1, 0)
    with pytest.raises(CorpusError, match="Unknown ontology"):
        schema.index("allergies")


def test_alignment_of_nested_spans(schema, back_pain_sequence):
    gold = spans_to_alignment(back_pain_sequence, schema)
    assert gold.targets == (20, 6, 22, 11, 1, 5, 2, 5, 3, 5)
    assert gold.path.emit_frames() == [2, 3, 4, 4, 7, 7, 8, 9, 10, 10]
    assert (gold.path.T, gold.path.U) == (10, 10)


def test_ontology_first_policy(schema, back_pain_sequence):
    gold = spans_to_alignment(back_pain_sequence, schema, policy="ontology-first")
    assert gold.targets == (20, 6, 11, 22, 1, 5, 2, 5, 3, 5)


def test_same_ontology_spans_close_innermost_first(schema):
    seq = LabeledSequence(tokens=(1, 2, 3), spans=(Span(0, 0, 0, 2), Span(0, 1, 0, 1)))
    gold = spans_to_alignment(seq, schema)
    assert gold.targets == (1, 2, 5, 5)
    assert gold.path.emit_frames() == [1, 1, 2, 3]


def test_sequence_without_spans_is_all_blank(schema):
    gold = spans_to_alignment(LabeledSequence(tokens=(4, 4, 4)), schema)
    assert gold.targets == ()
    assert gold.path.T == 3


def test_invalid_sequences(schema):
    with pytest.raises(CorpusError, match="cannot align an empty"):
        spans_to_alignment(LabeledSequence(tokens=()), schema)
    with pytest.raises(CorpusError, match="outside"):
        LabeledSequence(tokens=(1, 2), spans=(Span(0, 0, 1, 2),))
    crossing = LabeledSequence(tokens=(1, 2, 3, 4), spans=(Span(0, 0, 0, 2), Span(0, 1, 1, 3)))
    with pytest.raises(CorpusError, match="cross"):
        crossing.check(schema)
    with pytest.raises(CorpusError, match="label id"):
        LabeledSequence(tokens=(1,), spans=(Span(4, 2, 0, 0),)).check(schema)


def test_schema_validation():
    with pytest.raises(ConfigError, match="duplicate"):
        Ontology("x", ("a", "a"))
    with pytest.raises(ConfigError, match="unique"):
        OntologySchema((Ontology("x", ("a",)), Ontology("x", ("b",))))
    with pytest.raises(ConfigError, match="version"):
        OntologySchema.from_dict({"version": 2, "ontologies": []})


def test_generation_is_a_function_of_the_config(schema, tiny_corpus_config):
    first = generate_corpus(schema, tiny_corpus_config)
    assert first == generate_corpus(schema, tiny_corpus_config)
    assert first != generate_corpus(schema, replace(tiny_corpus_config, seed=8))


def test_generated_sequences_are_valid(schema, tiny_corpus_config):
    vocab = input_vocab(schema, tiny_corpus_config)
    assert vocab == 20 + 5 * 6 + 2 * 17
    corpus = generate_corpus(schema, tiny_corpus_config)
    assert len(corpus) == 6
    assert len({seq.source_id for seq in corpus}) == 6
    for seq in corpus:
        assert 12 <= len(seq) <= 40
        assert all(0 <= tok < vocab for tok in seq.tokens)
        seq.check(schema)
        gold = spans_to_alignment(seq, schema)
        assert gold.path.T == len(seq)


def test_empty_corpus(schema, tiny_corpus_config):
    config = replace(tiny_corpus_config, size=0)
    assert generate_corpus(schema, config) == []


def test_spans_that_cannot_fit(schema):
    config = CorpusConfig(size=1, min_length=2, max_length=5, min_span=3, max_span=4)
    with pytest.raises(CorpusError, match="cannot fit"):
        generate_corpus(schema, config)


def test_corpus_config_validation():
    with pytest.raises(ConfigError):
        CorpusConfig(size=-1)
    with pytest.raises(ConfigError):
        CorpusConfig(nesting_rate=1.5)


@pytest.fixture
def long_sequence() -> LabeledSequence:
    return LabeledSequence(
        tokens=tuple(range(30)),
        spans=(Span(0, 0, 2, 4), Span(1, 1, 10, 12), Span(2, 0, 20, 29)),
        source_id="conv-long",
    )


def test_segment_lengths_and_spans(rng, long_sequence):
    for _ in range(200):
        view = random_segment(long_sequence, 5, 12, rng)
        assert 5 <= len(view) <= 12
        start = int(view.source_id.split("@")[1].split(":")[0])
        assert view.tokens == long_sequence.tokens[start:start + len(view)]
        for span in view.spans:
            original = Span(span.ontology, span.label, span.start + start, span.end + start)
            assert original in long_sequence.spans


def test_clip_policy_trims_spans(rng, long_sequence):
    clipped = [random_segment(long_sequence, 25, 25, rng, policy="clip") for _ in range(20)]
    for view in clipped:
        assert len(view) == 25
        assert all(0 <= s.start <= s.end < 25 for s in view.spans)
    assert any(s.ontology == 2 and s.length < 10 for view in clipped for s in view.spans)


def test_short_sequences_come_back_whole(rng, back_pain_sequence):
    assert random_segment(back_pain_sequence, 10, 20, rng) is back_pain_sequence
    views = segmented_views(back_pain_sequence, 3, 4, 6, rng)
    assert len(views) == 3
    assert all(4 <= len(v) <= 6 for v in views)


def test_segmenter_validation(rng, back_pain_sequence):
    with pytest.raises(ConfigError):
        random_segment(back_pain_sequence, 0, 4, rng)
    with pytest.raises(ConfigError):
        random_segment(back_pain_sequence, 2, 4, rng, policy="keep")


def test_corpus_file_keeps_header_and_sequences(tmp_path, schema, back_pain_sequence):
    container = CorpusContainer(sequences=[back_pain_sequence], schema=schema, input_vocab=84, pseudo_labeled=True)
    path = save_corpus(tmp_path / "data" / "train.jsonl", container)
    loaded = load_corpus(path)
    assert loaded == container


def test_empty_file_is_an_empty_corpus(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("", encoding="utf-8")
    assert load_corpus(path) == CorpusContainer()


def test_bad_records_name_their_line(tmp_path, schema, back_pain_sequence):
    path = save_corpus(tmp_path / "c.jsonl", CorpusContainer(sequences=[back_pain_sequence], schema=schema))
    good = path.read_text(encoding="utf-8")

    path.write_text(good + "{not json\n", encoding="utf-8")
    with pytest.raises(CorpusError, match="^line 3: invalid JSON"):
        load_corpus(path)

    path.write_text(good + '{"source_id": "x"}\n', encoding="utf-8")
    with pytest.raises(CorpusError, match="^line 3: malformed"):
        load_corpus(path)

    path.write_text(good + '{"tokens": [1], "spans": [{"ontology": 0, "label": 0, "start": 0, "end": 3}]}\n', encoding="utf-8")
    with pytest.raises(CorpusError, match="^line 3:"):
        load_corpus(path)

    path.write_text('{"tokens": [1]}\n', encoding="utf-8")
    with pytest.raises(CorpusError, match="^line 1: expected"):
        load_corpus(path)


def test_schema_yaml(tmp_path, schema):
    path = save_schema(tmp_path / "schema.yaml", schema)
    assert load_schema(path) == schema
    path.write_text("ontologies: [unclosed\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="invalid YAML"):
        load_schema(path)


def test_token_ids_are_plain_ints(back_pain_sequence):
    seq = LabeledSequence(tokens=np.array([1, 2, 3]))
    assert all(type(t) is int for t in seq.tokens)
    assert len(back_pain_sequence) == 10
