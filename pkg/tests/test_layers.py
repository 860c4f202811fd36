import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hatespeech.errors import DataError, NumericError
from hatespeech.nn.functional import (
    cross_entropy,
    dense_forward,
    dropout_forward,
    embedding_forward,
    sigmoid,
    softmax,
)
from hatespeech.nn.lstm import bilstm_forward, lstm_forward
from hatespeech.nn.model import ModelConfig, forward, init_params


def test_embedding_lookup():
    rows = np.array([[0., 0, 0], [1, 2, 3]])
    assert embedding_forward(rows, [[0]]).tolist() == [[[0, 0, 0]]]
    assert embedding_forward(rows, [[1]]).tolist() == [[[1, 2, 3]]]
    assert embedding_forward(rows, [[1, 1]]).tolist() == [[[1, 2, 3], [1, 2, 3]]]
    with pytest.raises(DataError):
        embedding_forward(rows, [[2]])


def test_dropout_identity_cases():
    x = np.arange(6.0).reshape(2, 3)
    rng = np.random.default_rng(0)
    assert dropout_forward(x, 0.0, True, rng)[0] is x
    out, mask = dropout_forward(x, 0.7, False, rng)
    assert out is x and mask is None


def test_inverted_dropout_expectation():
    out, mask = dropout_forward(np.ones(10_000), 0.5, True, np.random.default_rng(1))
    assert 0.94 <= out.mean() <= 1.06
    assert set(np.unique(out)) <= {0.0, 2.0}


def test_dropout_rejects_bad_rate():
    with pytest.raises(ValueError):
        dropout_forward(np.ones(3), 1.0, True, np.random.default_rng(0))


def test_dense_heads():
    x = np.ones((2, 4))
    probs = dense_forward(np.zeros((4, 3)), np.zeros(3), x, "softmax")
    np.testing.assert_allclose(probs, 1 / 3, atol=1e-15)
    np.testing.assert_allclose(softmax(np.array([[0.0, math.log(3)]])), [[0.25, 0.75]],
                               rtol=1e-15)
    assert sigmoid(np.array(0.0)) == 0.5


def test_softmax_stable_for_large_logits():
    p = softmax(np.array([[1000.0, 0.0, -1000.0]]))
    assert np.isfinite(p).all() and p[0, 0] == 1.0
    assert np.isfinite(sigmoid(np.array([-1000.0, 1000.0]))).all()


def test_cross_entropy_values():
    assert cross_entropy(np.array([[1.0, 0.0]]), np.array([[1.0, 0.0]])) <= 1e-6
    assert cross_entropy(np.array([[0.5, 0.5]]), np.array([[1.0, 0.0]])) == \
        pytest.approx(0.693147, abs=1e-6)
    assert cross_entropy(np.array([[0.75, 0.25]]), np.array([[0.0, 1.0]])) == \
        pytest.approx(1.386294, abs=1e-6)
    # binary: mean over rows and classes
    assert cross_entropy(np.array([[0.5, 0.5]]), np.array([[1.0, 0.0]]), "binary-ce") == \
        pytest.approx(math.log(2), rel=1e-12)


def test_lstm_zero_weights_give_zero_state():
    x = np.random.default_rng(0).normal(size=(3, 5, 2))
    h, _ = lstm_forward(np.zeros((2, 8)), np.zeros((2, 8)), np.zeros(8), x)
    assert h.shape == (3, 2) and not h.any()


def _scalar_lstm(bias):
    h, cache = lstm_forward(np.zeros((1, 4)), np.zeros((1, 4)), np.array(bias, float),
                            np.zeros((1, 1, 1)))
    return h[0, 0], cache.c[0, 1, 0]


def test_lstm_saturated_gates_hand_evaluation():
    # all four slices biased: i = f = o = sigmoid(100) ~ 1 and g = tanh(100) ~ 1
    h, c = _scalar_lstm([100, 100, 100, 100])
    assert c == pytest.approx(1.0, abs=1e-12)
    assert h == pytest.approx(math.tanh(1.0), abs=1e-12)
    # candidate left unbiased: g = tanh(0) = 0 keeps the cell empty
    h, c = _scalar_lstm([100, 100, 0, 100])
    assert c == 0.0 and h == 0.0


def test_lstm_hand_evaluation_one_step():
    # D = H = 1, one step from zero state: z = x W + b
    W = np.array([[0.5, -0.3, 0.8, 0.1]])
    b = np.array([0.1, 0.2, -0.1, 0.3])
    x = 1.5
    z = [x * w + bb for w, bb in zip(W[0], b)]
    sig = lambda v: 1 / (1 + math.exp(-v))
    c = sig(z[0]) * math.tanh(z[2])
    expected = sig(z[3]) * math.tanh(c)
    h, _ = lstm_forward(W, np.zeros((1, 4)), b, np.full((1, 1, 1), x))
    assert h[0, 0] == pytest.approx(expected, rel=1e-14)


def test_padding_equals_explicit_zero_input():
    rng = np.random.default_rng(3)
    config = ModelConfig(hidden_units=3, max_len=4, dropout_rate=0, recurrent_dropout_rate=0)
    rows = np.vstack([np.zeros(2), rng.normal(size=(3, 2))])
    params = init_params(config, rows, rng)
    _, cache = forward(params, config, np.array([[0, 0, 0, 0]]))
    h_direct, _ = lstm_forward(params["lstm_fwd_W"], params["lstm_fwd_U"], params["lstm_fwd_b"],
                               np.zeros((1, 4, 2)))
    assert np.array_equal(cache["h"], h_direct)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_lstm_numeric_failure_names_timestep():
    x = np.ones((1, 4, 1))
    x[0, 2, 0] = np.nan
    with pytest.raises(NumericError, match="timestep 2"):
        lstm_forward(np.ones((1, 4)), np.zeros((1, 4)), np.zeros(4), x)


def test_bilstm_zero_and_width():
    x = np.random.default_rng(0).normal(size=(2, 3, 2))
    zero = (np.zeros((2, 12)), np.zeros((3, 12)), np.zeros(12))
    h, _ = bilstm_forward(zero, zero, x)
    assert h.shape == (2, 6) and not h.any()


def test_bilstm_palindrome_symmetry():
    rng = np.random.default_rng(5)
    a, b = rng.normal(size=2), rng.normal(size=2)
    x = np.stack([a, b, a])[None]  # 3-step palindrome
    params = (rng.normal(size=(2, 8)), rng.normal(size=(2, 8)), rng.normal(size=8))
    h, _ = bilstm_forward(params, params, x)
    assert np.array_equal(h[:, :2], h[:, 2:])
    h_asym, _ = bilstm_forward(params, params, np.stack([a, b, b])[None])
    assert not np.allclose(h_asym[:, :2], h_asym[:, 2:])


@settings(max_examples=30, deadline=None)
@given(arch=st.sampled_from(["lstm", "bilstm"]), H=st.integers(1, 5), k=st.integers(2, 4),
       n=st.integers(1, 4), T=st.integers(1, 6), seed=st.integers(0, 2**16))
def test_zero_weight_model_is_uniform(arch, H, k, n, T, seed):
    rng = np.random.default_rng(seed)
    config = ModelConfig(arch=arch, num_classes=k, hidden_units=H, max_len=T)
    rows = np.vstack([np.zeros(3), rng.normal(size=(5, 3))])
    params = {name: np.zeros_like(v) for name, v in init_params(config, rows, rng).items()}
    params["embedding"] = rows
    probs, cache = forward(params, config, rng.integers(0, 6, size=(n, T)))
    assert cache["h"].shape == (n, H * (2 if arch == "bilstm" else 1))
    assert not cache["h"].any()
    np.testing.assert_allclose(probs, 1.0 / k, atol=1e-12)
