"""Sequence classifier: embedding -> dropout -> (Bi)LSTM -> dense."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields

import numpy as np

from ..errors import NumericError
from .functional import (
    ACTIVATIONS,
    LOSSES,
    cross_entropy,
    cross_entropy_backward,
    dense_forward,
    dropout_forward,
    embedding_backward,
    embedding_forward,
)
from .lstm import bilstm_backward, bilstm_forward, lstm_backward, lstm_forward

ARCHS = ("lstm", "bilstm")


@dataclass
class ModelConfig:
    arch: str = "lstm"
    num_classes: int = 2
    hidden_units: int = 100
    dropout_rate: float = 0.2
    recurrent_dropout_rate: float = 0.2
    max_len: int = 250
    output_activation: str = "softmax"
    loss: str | None = None
    trainable_embedding: bool = True
    epochs: int = 10
    batch_size: int = 32
    learning_rate: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.loss is None:
            self.loss = "binary-ce" if self.output_activation == "sigmoid" else "categorical-ce"
        self.validate()

    def validate(self):
        if self.arch not in ARCHS:
            raise ValueError(f"arch must be one of {ARCHS}, got {self.arch!r}")
        if self.output_activation not in ACTIVATIONS:
            raise ValueError(f"output_activation must be one of {ACTIVATIONS}")
        if self.loss not in LOSSES:
            raise ValueError(f"loss must be one of {LOSSES}")
        if self.num_classes < 2:
            raise ValueError("num_classes must be >= 2")
        pair = (self.output_activation, self.loss)
        allowed = {("softmax", "categorical-ce")}
        if self.num_classes == 2:
            allowed.add(("sigmoid", "binary-ce"))
        if pair not in allowed:
            raise ValueError(f"{pair} is not a valid head for {self.num_classes} classes")
        for name in ("dropout_rate", "recurrent_dropout_rate"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ValueError(f"{name} must be in [0, 1)")
        for name in ("hidden_units", "max_len", "batch_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")

    @property
    def directions(self):
        return ("fwd", "bwd") if self.arch == "bilstm" else ("fwd",)

    def to_dict(self) -> dict[str, str]:
        return {k: repr(v) if isinstance(v, float) else str(v) for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, d):
        kwargs = {}
        for f in fields(cls):
            if f.name not in d:
                continue
            raw = d[f.name]
            default = f.default
            if isinstance(default, bool):
                kwargs[f.name] = raw in ("True", "true", "1")
            elif isinstance(default, int):
                kwargs[f.name] = int(raw)
            elif isinstance(default, float):
                kwargs[f.name] = float(raw)
            else:
                kwargs[f.name] = raw
        return cls(**kwargs)


def param_names(config: ModelConfig):
    names = ["embedding"]
    for d in config.directions:
        names += [f"lstm_{d}_W", f"lstm_{d}_U", f"lstm_{d}_b"]
    return names + ["dense_W", "dense_b"]


def trainable_names(config: ModelConfig):
    names = param_names(config)
    return names if config.trainable_embedding else names[1:]


def _glorot(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def init_params(config: ModelConfig, embedding_rows, rng) -> dict[str, np.ndarray]:
    """Glorot-uniform kernels, zero biases with the forget slice set to 1."""
    H = config.hidden_units
    dim = embedding_rows.shape[1]
    params = {"embedding": np.array(embedding_rows, dtype=np.float64)}
    for d in config.directions:
        b = np.zeros(4 * H)
        b[H: 2 * H] = 1.0
        params[f"lstm_{d}_W"] = _glorot(rng, dim, 4 * H)
        params[f"lstm_{d}_U"] = _glorot(rng, H, 4 * H)
        params[f"lstm_{d}_b"] = b
    out_in = H * len(config.directions)
    params["dense_W"] = _glorot(rng, out_in, config.num_classes)
    params["dense_b"] = np.zeros(config.num_classes)
    return params


def _lstm_triple(params, d):
    return params[f"lstm_{d}_W"], params[f"lstm_{d}_U"], params[f"lstm_{d}_b"]


def forward(params, config: ModelConfig, ids, training=False, rng=None, masks=None):
    """Class probabilities for a padded id matrix.

    ``masks`` (as found in a previous cache) replays fixed dropout masks,
    which makes a training-mode forward pass deterministic. Returns
    ``(probs, cache)``.
    """
    masks = masks or {}
    emb = embedding_forward(params["embedding"], ids)
    x, emb_mask = dropout_forward(emb, config.dropout_rate, training, rng,
                                  mask=masks.get("embedding"))
    rate, rec_rate = config.dropout_rate, config.recurrent_dropout_rate
    if config.arch == "bilstm":
        pair = masks.get("lstm_fwd"), masks.get("lstm_bwd")
        h, rnn_cache = bilstm_forward(_lstm_triple(params, "fwd"), _lstm_triple(params, "bwd"),
                                      x, rate, rec_rate, training, rng,
                                      None if pair == (None, None) else pair)
        used = {"lstm_fwd": (rnn_cache[0].in_mask, rnn_cache[0].rec_mask),
                "lstm_bwd": (rnn_cache[1].in_mask, rnn_cache[1].rec_mask)}
    else:
        h, rnn_cache = lstm_forward(*_lstm_triple(params, "fwd"), x, rate, rec_rate,
                                    training, rng, masks.get("lstm_fwd"))
        used = {"lstm_fwd": (rnn_cache.in_mask, rnn_cache.rec_mask)}
    probs = dense_forward(params["dense_W"], params["dense_b"], h, config.output_activation)
    if not np.isfinite(probs).all():
        raise NumericError("non-finite output probabilities")
    used["embedding"] = emb_mask
    cache = {"ids": np.asarray(ids), "h": h, "probs": probs, "rnn": rnn_cache, "masks": used}
    return probs, cache


def backward(params, config: ModelConfig, cache, onehot):
    """Analytic gradients of the mean loss for every trainable tensor."""
    probs, h = cache["probs"], cache["h"]
    dlogits = cross_entropy_backward(probs, onehot, config.loss, config.output_activation)
    grads = {"dense_W": h.T @ dlogits, "dense_b": dlogits.sum(axis=0)}
    dh = dlogits @ params["dense_W"].T
    if config.arch == "bilstm":
        dx, g_f, g_b = bilstm_backward(dh, cache["rnn"])
        per_dir = {"fwd": g_f, "bwd": g_b}
    else:
        dx, g_f = lstm_backward(dh, cache["rnn"])
        per_dir = {"fwd": g_f}
    for d, g in per_dir.items():
        for k, v in g.items():
            grads[f"lstm_{d}_{k}"] = v
    if config.trainable_embedding:
        emb_mask = cache["masks"]["embedding"]
        if emb_mask is not None:
            dx = dx * emb_mask
        grads["embedding"] = embedding_backward(dx, cache["ids"], params["embedding"].shape[0])
    return {name: grads[name] for name in trainable_names(config)}


def loss_and_grads(params, config, ids, onehot, training=False, rng=None, masks=None):
    probs, cache = forward(params, config, ids, training, rng, masks)
    loss = cross_entropy(probs, onehot, config.loss)
    return loss, probs, backward(params, config, cache, onehot), cache
