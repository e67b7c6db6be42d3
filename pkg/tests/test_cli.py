import json

import pytest

from spantrellis.cli.core._commands import CommandSelector
from spantrellis.cli.core.main import exit_code
from spantrellis.cli.main import build_parser, main
from spantrellis.corpus.main import load_corpus, load_schema
from spantrellis.trainer.main import load_config, read_invocation, write_config
from spantrellis.utils.errors import ConfigError, CorpusError, CriterionFailure, NoAdmissiblePathError


@pytest.fixture
def config_file(tmp_path, tiny_experiment):
    return str(write_config(tmp_path / "tiny.yaml", tiny_experiment))


def test_gen_data_writes_corpus_schema_and_resolved_config(tmp_path, config_file):
    out = tmp_path / "data"
    assert main(["gen-data", "--config", config_file, "--size", "3", "--seed", "5", "--out", str(out)]) == 0

    corpus = load_corpus(out / "corpus.jsonl")
    assert len(corpus.sequences) == 3
    assert corpus.input_vocab == 84
    assert corpus.schema == load_schema(out / "schema.yaml")
    resolved = load_config(out / "resolved_config.yaml")
    assert resolved.seed == 5
    assert resolved.data.corpus.size == 3
    assert read_invocation(out / "resolved_config.yaml")["size"] == 3


def test_empty_corpus(tmp_path):
    assert main(["gen-data", "--size", "0", "--name", "none", "--out", str(tmp_path)]) == 0
    assert load_corpus(tmp_path / "none.jsonl").sequences == []


def test_train_decode_eval_and_pseudo_label(tmp_path, config_file):
    data, run = tmp_path / "data", tmp_path / "run"
    assert main(["gen-data", "--config", config_file, "--size", "2", "--out", str(data)]) == 0
    assert main(["train", "--config", config_file, "--out", str(run)]) == 0
    assert (run / "checkpoint.bin").exists()
    assert (run / "curve.csv").exists()

    model = ["--config", config_file, "--checkpoint", str(run / "checkpoint.bin"), "--input", str(data / "corpus.jsonl")]
    assert main(["decode", *model, "--out", str(tmp_path / "decode")]) == 0
    records = [json.loads(line) for line in (tmp_path / "decode" / "decode.jsonl").read_text(encoding="utf-8").splitlines()]
    assert len(records) == 2
    assert set(records[0]) == {"source_id", "frames", "score", "labels", "emit_frames", "spans", "spurious_markers"}

    assert main(["eval", *model, "--average", "macro", "--out", str(tmp_path / "eval")]) == 0
    scores = json.loads((tmp_path / "eval" / "scores.json").read_text(encoding="utf-8"))
    assert scores["local"]["f1"] <= scores["global"]["f1"]
    assert (tmp_path / "eval" / "ontology_report.csv").exists()

    assert main(["pseudo-label", *model, "--out", str(tmp_path / "pseudo")]) == 0
    assert load_corpus(tmp_path / "pseudo" / "pseudo_labeled.jsonl").pseudo_labeled

    checkpoint, corpus = str(run / "checkpoint.bin"), str(data / "corpus.jsonl")
    for command, out in (("decode", "decode"), ("eval", "eval"), ("pseudo-label", "pseudo")):
        invocation = read_invocation(tmp_path / out / "resolved_config.yaml")
        assert invocation["command"] == command
        assert (invocation["checkpoint"], invocation["input"], invocation["config"]) == (checkpoint, corpus, config_file)
    assert read_invocation(tmp_path / "eval" / "resolved_config.yaml")["average"] == "macro"
    assert read_invocation(run / "resolved_config.yaml")["command"] == "train"
    assert load_config(run / "resolved_config.yaml") == load_config(config_file)


def test_verify_single_check(tmp_path):
    assert main(["verify", "--quick", "--check", "enumeration", "--out", str(tmp_path)]) == 0
    record = json.loads((tmp_path / "verify.json").read_text(encoding="utf-8"))
    assert record["verdict"] == "pass"
    invocation = read_invocation(tmp_path / "resolved_config.yaml")
    assert (invocation["command"], invocation["quick"], invocation["check"]) == ("verify", True, ["enumeration"])


def test_experiment_name_is_recorded(tmp_path, tiny_experiment):
    args = build_parser().parse_args(["experiment", "short-vs-long", "--out", str(tmp_path)])
    CommandSelector(args, tiny_experiment).select("experiment")._write_config()
    invocation = read_invocation(tmp_path / "resolved_config.yaml")
    assert (invocation["command"], invocation["experiment"]) == ("experiment", "short-vs-long")
    assert load_config(tmp_path / "resolved_config.yaml") == tiny_experiment


def test_usage_errors_exit_with_2(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["gen-data", "--sizes", "3"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["experiment", "bigger-beam"])
    assert info.value.code == 2


def test_bad_config_exits_with_3(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("epochs: 2\nlearning_rate: 0.1\n", encoding="utf-8")
    assert main(["train", "--config", str(path), "--out", str(tmp_path / "run")]) == 3


def test_bad_data_exits_with_4(tmp_path):
    corpus = tmp_path / "broken.jsonl"
    corpus.write_text("{not json\n", encoding="utf-8")
    args = ["--checkpoint", str(tmp_path / "missing.bin"), "--input", str(corpus), "--out", str(tmp_path / "out")]
    assert main(["decode", *args]) == 4


def test_exit_codes():
    assert exit_code(CriterionFailure("duality", "off by 1")) == 6
    assert exit_code(ConfigError("x")) == 3
    assert exit_code(CorpusError("x", line=2)) == 4
    assert exit_code(NoAdmissiblePathError("x")) == 5
    assert exit_code(FileNotFoundError("x")) == 4
    assert exit_code(KeyError("x")) is None
