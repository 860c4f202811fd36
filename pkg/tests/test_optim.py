import numpy as np
import pytest

from hatespeech.nn.optim import AdamState, adam_step


def test_first_step_moves_by_lr():
    params = {"w": np.array([0.0])}
    adam_step(params, {"w": np.array([0.1])}, AdamState(), lr=0.001)
    assert params["w"][0] == pytest.approx(-0.001 * 0.1 / (0.1 + 1e-8), rel=1e-12)


def test_hand_evaluated_second_step():
    params, state = {"w": np.array([1.0])}, AdamState()
    adam_step(params, {"w": np.array([0.2])}, state, lr=0.01)
    adam_step(params, {"w": np.array([-0.4])}, state, lr=0.01)
    m = 0.9 * (0.1 * 0.2) + 0.1 * -0.4
    v = 0.999 * (0.001 * 0.04) + 0.001 * 0.16
    step2 = 0.01 * (m / (1 - 0.9**2)) / (np.sqrt(v / (1 - 0.999**2)) + 1e-8)
    step1 = 0.01 * 0.2 / (0.2 + 1e-8)
    assert params["w"][0] == pytest.approx(1.0 - step1 - step2, rel=1e-12)
    assert state.t == 2


def test_zero_gradient_leaves_params():
    params, state = {"w": np.array([1.5, -2.0])}, AdamState()
    for _ in range(5):
        adam_step(params, {"w": np.zeros(2)}, state)
    assert params["w"].tolist() == [1.5, -2.0]


def test_tensors_updated_independently():
    a = {"x": np.ones(3), "y": np.ones(2)}
    b = {"x": np.ones(3)}
    sa, sb = AdamState(), AdamState()
    rng = np.random.default_rng(0)
    for _ in range(3):
        gx = rng.normal(size=3)
        adam_step(a, {"x": gx, "y": rng.normal(size=2)}, sa)
        adam_step(b, {"x": gx}, sb)
    assert np.array_equal(a["x"], b["x"])
    assert sa.m["y"].shape == (2,)
