import numpy as np
import pytest
from scipy.special import logsumexp

from spantrellis.decoder.main import DecodeConfig, beam_search
from spantrellis.lattice.main import (
    Constrained,
    Fixed,
    Unconstrained,
    loss_fixed,
    loss_unconstrained,
)
from spantrellis.model.main import (
    Adam,
    ModelConfig,
    OptimizerConfig,
    Seq2SeqState,
    backprop,
    backprop_batch,
    build_lattice,
    encode,
    init_params,
    load_checkpoint,
    make_scorer,
    path_lattice,
    predict_step,
    save_checkpoint,
    start_state,
    tree,
)
from spantrellis.utils.errors import ConfigError, ContractViolation
from spantrellis.verify.core._random import random_path
from spantrellis.verify.main import central_differences, relative_error

TOKENS = np.array([0, 3, 1, 4])
TARGETS = np.array([2, 1])


def small_config(**kwargs) -> ModelConfig:
    defaults = dict(input_vocab=5, output_vocab=3, hidden=3, embedding=3, layers=1, window=2, seed=4, init_scale=0.5)
    return ModelConfig(**(defaults | kwargs))


def gradient_error(params, mode) -> float:
    names = [name for name, _ in tree.named_arrays(params)]
    shapes = [a.shape for _, a in tree.named_arrays(params)]
    sizes = [a.size for _, a in tree.named_arrays(params)]

    def nll(w):
        chunks = np.split(w, np.cumsum(sizes)[:-1])
        arrays = {n: c.reshape(s) for n, c, s in zip(names, chunks, shapes)}
        return -backprop(TOKENS, TARGETS, mode, tree.replace_arrays(params, arrays))[0]

    _, grads = backprop(TOKENS, TARGETS, mode, params)
    analytic = np.concatenate([a.ravel() for _, a in tree.named_arrays(grads)])
    numeric = central_differences(nll, np.concatenate([a.ravel() for _, a in tree.named_arrays(params)]))
    return relative_error(analytic, numeric)


@pytest.fixture
def path(rng):
    return random_path(rng, len(TOKENS), len(TARGETS))


@pytest.mark.parametrize(
    ("architecture", "encoder", "mode_name"),
    [
        ("transducer", "attention", "unconstrained"),
        ("transducer", "bigru", "constrained"),
        ("transducer", "attention", "fixed"),
        ("seq2seq", "bigru", "fixed"),
        ("seq2seq", "attention", "fixed"),
    ],
)
def test_gradients_match_central_differences(path, architecture, encoder, mode_name):
    params = init_params(small_config(architecture=architecture, encoder=encoder))
    mode = {"unconstrained": Unconstrained(), "fixed": Fixed(path), "constrained": Constrained(path, 1, 1)}[mode_name]
    assert gradient_error(params, mode) < 1e-4


def test_lattice_rows_come_from_one_distribution():
    params = init_params(small_config())
    lattice = build_lattice(TOKENS, TARGETS, params)
    assert (lattice.T, lattice.U) == (4, 2)
    both = np.logaddexp(lattice.label_logprob, lattice.blank_logprob[:, :2])
    assert (both < 0).all()


def test_transducer_log_likelihood_is_the_lattice_loss(path):
    params = init_params(small_config())
    lattice = build_lattice(TOKENS, TARGETS, params)
    assert backprop(TOKENS, TARGETS, Unconstrained(), params)[0] == loss_unconstrained(lattice)
    assert backprop(TOKENS, TARGETS, path, params)[0] == loss_fixed(lattice, path)


def test_zero_band_gradients_equal_fixed(path):
    params = init_params(small_config())
    _, band = backprop(TOKENS, TARGETS, Constrained(path, 0, 0), params)
    _, fixed = backprop(TOKENS, TARGETS, Fixed(path), params)
    for (name, a), (_, b) in zip(tree.named_arrays(band), tree.named_arrays(fixed)):
        np.testing.assert_array_equal(a, b, err_msg=name)


@pytest.mark.parametrize("architecture", ["transducer", "seq2seq"])
def test_batch_backprop_matches_single_examples(rng, architecture):
    params = init_params(small_config(architecture=architecture))
    inputs = [(TOKENS, TARGETS), (TOKENS[:2], TARGETS[:1]), (TOKENS[:3], np.array([3]))]
    paths = [random_path(rng, len(tokens), len(targets)) for tokens, targets in inputs]
    modes = [Fixed(p) for p in paths] if architecture == "seq2seq" else [Unconstrained(), paths[1], Constrained(paths[2], 1, 1)]

    batched = backprop_batch(inputs, modes, params, workers=2)
    for (tokens, targets), mode, (value, grads) in zip(inputs, modes, batched):
        single_value, single_grads = backprop(tokens, targets, mode, params)
        assert value == single_value
        for (name, a), (_, b) in zip(tree.named_arrays(grads), tree.named_arrays(single_grads)):
            np.testing.assert_array_equal(a, b, err_msg=name)

    with pytest.raises(ContractViolation, match="loss modes"):
        backprop_batch(inputs, modes[:2], params)


def test_seq2seq_path_lattice_reproduces_its_loss(path):
    params = init_params(small_config(architecture="seq2seq"))
    lattice = path_lattice(TOKENS, TARGETS, path, params)
    loglik, _ = backprop(TOKENS, TARGETS, path, params)
    assert loss_fixed(lattice, path) == pytest.approx(loglik, abs=1e-12)
    assert loss_unconstrained(lattice) == pytest.approx(loglik, abs=1e-12)


def test_seq2seq_scorer_caches_per_state_object():
    scorer = make_scorer(TOKENS, init_params(small_config(architecture="seq2seq")))
    state = scorer.initial_state()
    assert scorer.score(state, 1) is scorer.score(state, 1)
    twin = Seq2SeqState(h=state.h.copy(), prev=state.prev)
    assert scorer.score(twin, 1) is not scorer.score(state, 1)
    np.testing.assert_array_equal(scorer.score(twin, 1), scorer.score(state, 1))
    assert scorer.advance(state, 2, 1).h is scorer.advance(state, 0, 1).h


def test_seq2seq_trains_on_fixed_paths_only():
    params = init_params(small_config(architecture="seq2seq"))
    with pytest.raises(ContractViolation, match="fixed alignment"):
        backprop(TOKENS, TARGETS, Unconstrained(), params)


def test_blank_never_reaches_the_prediction_network():
    params = init_params(small_config())
    _, state = start_state(params.prediction)
    g, new_state = predict_step(state, 2, params.prediction)
    assert g.shape == new_state.shape == (3,)
    with pytest.raises(ContractViolation, match="Blank"):
        predict_step(state, 0, params.prediction)


def test_out_of_range_ids_are_rejected():
    params = init_params(small_config())
    assert encode(TOKENS, params.encoder).shape == (4, 3)
    with pytest.raises(ContractViolation, match="Token ids"):
        encode(np.array([0, 5]), params.encoder)
    with pytest.raises(ContractViolation, match="Target labels"):
        build_lattice(TOKENS, np.array([0]), params)


@pytest.mark.parametrize("architecture", ["transducer", "seq2seq"])
def test_scorer_distributions_are_normalized(architecture):
    params = init_params(small_config(architecture=architecture))
    scorer = make_scorer(TOKENS, params)
    state = scorer.initial_state()
    for t in range(1, 5):
        log_probs = scorer.score(state, t)
        assert log_probs.shape == (4,)
        assert logsumexp(log_probs) == pytest.approx(0.0, abs=1e-9)
        state = scorer.advance(state, 1, t)
    hyps = beam_search(scorer, 4, DecodeConfig(beam=4.0, max_expansion=2, max_hyps=3))
    assert 1 <= len(hyps) <= 3


def test_init_is_deterministic_per_seed():
    a, b = init_params(small_config()), init_params(small_config())
    c = init_params(small_config(seed=5))
    for (_, x), (_, y), (_, z) in zip(tree.named_arrays(a), tree.named_arrays(b), tree.named_arrays(c)):
        np.testing.assert_array_equal(x, y)
    assert any(not np.array_equal(x, z) for (_, x), (_, z) in zip(tree.named_arrays(a), tree.named_arrays(c)) if x.any())


@pytest.mark.parametrize("architecture", ["transducer", "seq2seq"])
def test_checkpoint_restores_every_array(tmp_path, architecture):
    config = small_config(architecture=architecture, encoder="bigru")
    params = init_params(config, np.random.default_rng(99))
    path = save_checkpoint(tmp_path / "model.ckpt", config, params)

    loaded_config, loaded = load_checkpoint(path)
    assert loaded_config == config
    for (name, a), (other, b) in zip(tree.named_arrays(params), tree.named_arrays(loaded)):
        assert name == other
        np.testing.assert_array_equal(a, b)


def test_corrupt_checkpoint(tmp_path):
    config = small_config()
    path = save_checkpoint(tmp_path / "model.ckpt", config, init_params(config))
    data = path.read_bytes()
    path.write_bytes(data[:-8])
    with pytest.raises(ContractViolation, match="truncated"):
        load_checkpoint(path)
    path.write_bytes(b"NOPE" + data[4:])
    with pytest.raises(ContractViolation, match="not a checkpoint"):
        load_checkpoint(path)


def test_adam_clips_and_descends():
    config = small_config()
    params = init_params(config)
    optimizer = Adam(params, OptimizerConfig(lr=0.05, clip=1.0))
    before, grads = backprop(TOKENS, TARGETS, Unconstrained(), params)
    clipped, norm = optimizer.clip(grads)
    assert norm > 0
    assert tree.global_norm(clipped) <= 1.0 + 1e-12
    for _ in range(20):
        _, grads = backprop(TOKENS, TARGETS, Unconstrained(), params)
        params = optimizer.step(params, optimizer.clip(grads)[0])
    assert backprop(TOKENS, TARGETS, Unconstrained(), params)[0] > before


@pytest.mark.parametrize("kwargs", [{"architecture": "lstm"}, {"encoder": "cnn"}, {"hidden": 0}, {"window": -1}])
def test_invalid_model_config(kwargs):
    with pytest.raises(ConfigError):
        small_config(**kwargs)
