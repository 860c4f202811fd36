"""Stateless layer primitives: lookup, dropout, dense heads and losses."""
from __future__ import annotations

import numpy as np

from ..errors import DataError

PROB_CLIP = 1e-7
ACTIVATIONS = ("softmax", "sigmoid")
LOSSES = ("categorical-ce", "binary-ce")


def sigmoid(z):
    # exp(-log(1 + e^-z)) never overflows
    return np.exp(-np.logaddexp(0.0, -z))


def softmax(z):
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def embedding_forward(rows, ids):
    ids = np.asarray(ids)
    if ids.size and (ids.min() < 0 or ids.max() >= rows.shape[0]):
        raise DataError(
            f"token id out of range: ids span [{ids.min()}, {ids.max()}], "
            f"embedding has {rows.shape[0]} rows"
        )
    return rows[ids]


def embedding_backward(dout, ids, n_rows):
    """Scatter-add into a dense gradient. Row 0 (padding) never receives gradient."""
    grad = np.zeros((n_rows, dout.shape[-1]))
    np.add.at(grad, ids.reshape(-1), dout.reshape(-1, dout.shape[-1]))
    grad[0] = 0.0
    return grad


def dropout_mask(shape, rate, rng):
    """Inverted-dropout mask: kept entries hold 1/(1-rate), dropped ones 0."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if rate == 0.0:
        return np.ones(shape)
    keep = rng.random(shape) >= rate
    return keep / (1.0 - rate)


def dropout_forward(x, rate, training, rng=None, mask=None):
    """Returns ``(out, mask)``; ``mask`` is None when dropout is inactive."""
    if mask is None:
        if not training or rate == 0.0:
            return x, None
        mask = dropout_mask(x.shape, rate, rng)
    return x * mask, mask


def dense_forward(W, b, x, activation="softmax"):
    logits = x @ W + b
    if activation == "softmax":
        return softmax(logits)
    if activation == "sigmoid":
        return sigmoid(logits)
    raise ValueError(f"activation must be one of {ACTIVATIONS}, got {activation!r}")


def cross_entropy(probs, onehot, kind="categorical-ce"):
    p = np.clip(probs, PROB_CLIP, 1.0 - PROB_CLIP)
    if kind == "categorical-ce":
        return float(-np.mean(np.sum(onehot * np.log(p), axis=1)))
    if kind == "binary-ce":
        return float(-np.mean(onehot * np.log(p) + (1.0 - onehot) * np.log(1.0 - p)))
    raise ValueError(f"loss must be one of {LOSSES}, got {kind!r}")


def cross_entropy_backward(probs, onehot, kind="categorical-ce", activation="softmax"):
    """Gradient of the clipped loss with respect to the dense logits.

    Clipping is part of the loss, so entries pinned by the clip get zero
    gradient. Away from the clip bounds the softmax/categorical pair reduces
    to ``(probs - onehot) / n``.
    """
    n = probs.shape[0]
    inside = (probs > PROB_CLIP) & (probs < 1.0 - PROB_CLIP)
    p = np.clip(probs, PROB_CLIP, 1.0 - PROB_CLIP)
    if kind == "categorical-ce":
        dp = -onehot / p / n
    elif kind == "binary-ce":
        dp = (-(onehot / p) + (1.0 - onehot) / (1.0 - p)) / probs.size
    else:
        raise ValueError(f"loss must be one of {LOSSES}, got {kind!r}")
    dp = dp * inside
    if activation == "softmax":
        return probs * (dp - np.sum(dp * probs, axis=1, keepdims=True))
    if activation == "sigmoid":
        return dp * probs * (1.0 - probs)
    raise ValueError(f"activation must be one of {ACTIVATIONS}, got {activation!r}")
