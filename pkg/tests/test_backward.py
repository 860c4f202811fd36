import numpy as np
import pytest

from hatespeech.errors import GradientCheckError
from hatespeech.nn.functional import cross_entropy_backward
from hatespeech.nn.gradcheck import gradient_check, random_problem
from hatespeech.nn.model import backward, forward, init_params, ModelConfig


@pytest.mark.parametrize("arch", ["lstm", "bilstm"])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_gradients_match_finite_differences(arch, seed):
    config, params, ids, onehot = random_problem(seed, arch=arch, T=5, H=4, dim=3, k=3)
    report = gradient_check(params, config, ids, onehot)
    assert report.passed, str(report)


def test_sigmoid_binary_head_gradients():
    config, params, ids, onehot = random_problem(4, k=2, output_activation="sigmoid")
    assert config.loss == "binary-ce"
    assert gradient_check(params, config, ids, onehot).passed


def test_gradients_with_replayed_dropout_masks():
    config, params, ids, onehot = random_problem(6, arch="bilstm", dropout=0.3)
    _, cache = forward(params, config, ids, training=True, rng=np.random.default_rng(9))
    masks = cache["masks"]
    assert masks["embedding"] is not None and masks["lstm_bwd"][1] is not None
    assert gradient_check(params, config, ids, onehot, masks=masks).passed


def test_dropout_requires_fixed_masks():
    config, params, ids, onehot = random_problem(6, dropout=0.3)
    with pytest.raises(ValueError, match="dropout"):
        gradient_check(params, config, ids, onehot)


def test_dense_bias_gradient_identity():
    config, params, ids, onehot = random_problem(2, T=3, H=2, k=3, n=5)
    probs, cache = forward(params, config, ids)
    grads = backward(params, config, cache, onehot)
    np.testing.assert_allclose(grads["dense_b"], (probs - onehot).mean(axis=0), atol=1e-15)


def test_clipped_probabilities_get_no_gradient():
    probs = np.array([[1.0 - 1e-12, 1e-12]])
    d = cross_entropy_backward(probs, np.array([[0.0, 1.0]]))
    assert not d.any()


def test_frozen_embedding_has_no_gradient_and_is_not_checked():
    config, params, ids, onehot = random_problem(3, trainable_embedding=False)
    _, cache = forward(params, config, ids)
    assert "embedding" not in backward(params, config, cache, onehot)
    report = gradient_check(params, config, ids, onehot)
    assert "embedding" not in report.max_rel_error


def test_padding_row_never_gets_gradient():
    config, params, ids, onehot = random_problem(3)
    ids[:, -2:] = 0
    _, cache = forward(params, config, ids)
    assert not backward(params, config, cache, onehot)["embedding"][0].any()


def test_fault_injection_detected():
    config, params, ids, onehot = random_problem(1)

    def negated_dense(p, c, cache, y):
        grads = backward(p, c, cache, y)
        grads["dense_W"] = -grads["dense_W"]
        grads["dense_b"] = -grads["dense_b"]
        return grads

    with pytest.raises(GradientCheckError) as exc:
        gradient_check(params, config, ids, onehot, grad_fn=negated_dense)
    assert set(exc.value.report.failed) == {"dense_W", "dense_b"}


def test_large_models_are_refused():
    config = ModelConfig(hidden_units=60, dropout_rate=0, recurrent_dropout_rate=0)
    rows = np.zeros((5, 3))
    params = init_params(config, rows, np.random.default_rng(0))
    with pytest.raises(ValueError, match="parameters"):
        gradient_check(params, config, np.zeros((1, 2), int), np.eye(2)[:1])
