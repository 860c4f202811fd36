"""LSTM and bidirectional LSTM layers with backpropagation through time.

Packed gate layout along the last axis is ``[i, f, g, o]``::

    z_t = (x_t * m_x) @ W + (h_{t-1} * m_h) @ U + b
    i, f, o = sigmoid(z_i), sigmoid(z_f), sigmoid(z_o)
    g = tanh(z_g)
    c_t = f * c_{t-1} + i * g
    h_t = o * tanh(c_t)

``m_x`` and ``m_h`` are the input and recurrent dropout masks. Each is drawn
once per sequence and reused at every timestep. Only the final hidden state
is returned.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericError
from .functional import dropout_mask, sigmoid


@dataclass
class LSTMCache:
    x: np.ndarray          # (n, T, D) masked inputs
    h: np.ndarray          # (n, T+1, H) hidden states, h[:, 0] = 0
    c: np.ndarray          # (n, T+1, H) cell states
    gates: np.ndarray      # (n, T, 4H) post-activation gates
    in_mask: np.ndarray | None
    rec_mask: np.ndarray | None
    W: np.ndarray
    U: np.ndarray


def sample_lstm_masks(n, dim, hidden, dropout, recurrent_dropout, rng):
    in_mask = dropout_mask((n, dim), dropout, rng) if dropout > 0 else None
    rec_mask = dropout_mask((n, hidden), recurrent_dropout, rng) if recurrent_dropout > 0 else None
    return in_mask, rec_mask


def lstm_forward(W, U, b, x, dropout=0.0, recurrent_dropout=0.0, training=False,
                 rng=None, masks=None):
    """Run the recurrence over ``x`` of shape ``(n, T, D)``.

    ``masks`` overrides sampling with a fixed ``(in_mask, rec_mask)`` pair;
    either entry may be None. Returns ``(h_T, cache)``.
    """
    n, T, D = x.shape
    H = U.shape[0]
    if masks is None:
        masks = (None, None)
        if training:
            masks = sample_lstm_masks(n, D, H, dropout, recurrent_dropout, rng)
    in_mask, rec_mask = masks
    if in_mask is not None:
        x = x * in_mask[:, None, :]

    # input projections for every step at once
    xw = x @ W + b
    h = np.zeros((n, T + 1, H))
    c = np.zeros((n, T + 1, H))
    gates = np.empty((n, T, 4 * H))
    for t in range(T):
        h_prev = h[:, t] if rec_mask is None else h[:, t] * rec_mask
        z = xw[:, t] + h_prev @ U
        a = gates[:, t]
        a[:, : 2 * H] = sigmoid(z[:, : 2 * H])
        a[:, 2 * H: 3 * H] = np.tanh(z[:, 2 * H: 3 * H])
        a[:, 3 * H:] = sigmoid(z[:, 3 * H:])
        i, f, g, o = a[:, :H], a[:, H: 2 * H], a[:, 2 * H: 3 * H], a[:, 3 * H:]
        c[:, t + 1] = f * c[:, t] + i * g
        h[:, t + 1] = o * np.tanh(c[:, t + 1])
        if not np.isfinite(c[:, t + 1]).all():
            raise NumericError(f"non-finite LSTM activation at timestep {t}")
    return h[:, T].copy(), LSTMCache(x, h, c, gates, in_mask, rec_mask, W, U)


def lstm_backward(dh_last, cache: LSTMCache):
    """Backpropagate ``dL/dh_T`` through every timestep.

    Returns ``(dx, {"W", "U", "b"})`` where ``dx`` is the gradient with respect
    to the unmasked input.
    """
    x, h, c, gates, W, U = cache.x, cache.h, cache.c, cache.gates, cache.W, cache.U
    n, T, D = x.shape
    H = U.shape[0]
    dW = np.zeros_like(W)
    dU = np.zeros_like(U)
    db = np.zeros(4 * H)
    dz_all = np.empty((n, T, 4 * H))
    dh = dh_last
    dc = np.zeros((n, H))
    for t in range(T - 1, -1, -1):
        a = gates[:, t]
        i, f, g, o = a[:, :H], a[:, H: 2 * H], a[:, 2 * H: 3 * H], a[:, 3 * H:]
        tc = np.tanh(c[:, t + 1])
        dc = dc + dh * o * (1.0 - tc * tc)
        dz = dz_all[:, t]
        dz[:, :H] = dc * g * i * (1.0 - i)
        dz[:, H: 2 * H] = dc * c[:, t] * f * (1.0 - f)
        dz[:, 2 * H: 3 * H] = dc * i * (1.0 - g * g)
        dz[:, 3 * H:] = dh * tc * o * (1.0 - o)
        h_prev = h[:, t] if cache.rec_mask is None else h[:, t] * cache.rec_mask
        dU += h_prev.T @ dz
        dh = dz @ U.T
        if cache.rec_mask is not None:
            dh = dh * cache.rec_mask
        dc = dc * f
    flat_dz = dz_all.reshape(n * T, 4 * H)
    dW += x.reshape(n * T, D).T @ flat_dz
    db += flat_dz.sum(axis=0)
    dx = dz_all @ W.T
    if cache.in_mask is not None:
        dx = dx * cache.in_mask[:, None, :]
    if not (np.isfinite(dW).all() and np.isfinite(dU).all()):
        raise NumericError("non-finite LSTM gradient")
    return dx, {"W": dW, "U": dU, "b": db}


def bilstm_forward(params_fwd, params_bwd, x, dropout=0.0, recurrent_dropout=0.0,
                   training=False, rng=None, masks=None):
    """Forward pass plus a pass over the time-reversed input; outputs ``[h_fwd ; h_bwd]``.

    ``params_*`` are ``(W, U, b)`` triples. ``masks`` is an optional pair of
    per-direction mask pairs. Returns ``(h, (cache_fwd, cache_bwd))``.
    """
    m_fwd, m_bwd = masks if masks is not None else (None, None)
    h_f, cache_f = lstm_forward(*params_fwd, x, dropout, recurrent_dropout, training, rng, m_fwd)
    # contiguous copy keeps the BLAS path (and rounding) identical to the forward pass
    x_rev = np.ascontiguousarray(x[:, ::-1])
    h_b, cache_b = lstm_forward(*params_bwd, x_rev, dropout, recurrent_dropout, training, rng,
                                m_bwd)
    return np.concatenate([h_f, h_b], axis=1), (cache_f, cache_b)


def bilstm_backward(dh, caches):
    cache_f, cache_b = caches
    H = cache_f.U.shape[0]
    dx_f, g_f = lstm_backward(dh[:, :H], cache_f)
    dx_b, g_b = lstm_backward(dh[:, H:], cache_b)
    return dx_f + dx_b[:, ::-1], g_f, g_b
