"""Central finite-difference check of the analytic gradients."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import GradientCheckError
from .functional import cross_entropy
from .model import ModelConfig, backward, forward, init_params, trainable_names

MAX_CHECK_PARAMS = 10_000


@dataclass
class GradCheckReport:
    tolerance: float
    max_rel_error: dict[str, float] = field(default_factory=dict)
    n_checked: dict[str, int] = field(default_factory=dict)

    @property
    def failed(self):
        return [k for k, v in self.max_rel_error.items() if not v < self.tolerance]

    @property
    def passed(self):
        return not self.failed

    def __str__(self):
        lines = [f"{k:<14} max_rel_err={v:.3e} coords={self.n_checked[k]}"
                 for k, v in self.max_rel_error.items()]
        return "\n".join(lines)


def relative_error(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-8)


def gradient_check(params, config: ModelConfig, ids, onehot, tolerance=1e-4, h=1e-5,
                   n_coords=50, seed=0, masks=None, grad_fn=None, raise_on_fail=True):
    """Compare analytic gradients with central differences on sampled coordinates.

    Dropout must be disabled in ``config`` or replayed through fixed ``masks``.
    The padding row of the embedding is not a parameter and is never sampled.
    ``grad_fn(params, config, cache, onehot)`` substitutes the analytic
    gradient, which is how fault injection is tested.
    """
    names = trainable_names(config)
    total = sum(params[k].size - (params[k].shape[1] if k == "embedding" else 0) for k in names)
    if total > MAX_CHECK_PARAMS:
        raise ValueError(f"model has {total} trainable parameters; limit is {MAX_CHECK_PARAMS}")
    if masks is None and (config.dropout_rate > 0 or config.recurrent_dropout_rate > 0):
        raise ValueError("dropout must be disabled or masks supplied")
    training = masks is not None
    grad_fn = grad_fn or backward

    _, cache = forward(params, config, ids, training=training, masks=masks)
    grads = grad_fn(params, config, cache, onehot)

    def loss():
        probs, _ = forward(params, config, ids, training=training, masks=masks)
        return cross_entropy(probs, onehot, config.loss)

    rng = np.random.default_rng(seed)
    report = GradCheckReport(tolerance)
    for name in names:
        tensor = params[name]
        flat = tensor.reshape(-1)
        first = tensor.shape[1] if name == "embedding" else 0
        candidates = np.arange(first, flat.size)
        if candidates.size > n_coords:
            candidates = np.sort(rng.choice(candidates, size=n_coords, replace=False))
        worst = 0.0
        analytic = grads[name].reshape(-1)
        for j in candidates:
            orig = flat[j]
            flat[j] = orig + h
            up = loss()
            flat[j] = orig - h
            down = loss()
            flat[j] = orig
            worst = max(worst, relative_error(analytic[j], (up - down) / (2 * h)))
        report.max_rel_error[name] = worst
        report.n_checked[name] = int(candidates.size)
    if raise_on_fail and not report.passed:
        raise GradientCheckError(report)
    return report


def random_problem(seed, arch="lstm", T=4, H=3, dim=3, k=3, vocab=6, n=4,
                   trainable_embedding=True, output_activation="softmax", dropout=0.0):
    """Small random model and batch for gradient checking.

    Embedding rows are drawn on [-1, 1] so gradients stay well above the
    finite-difference noise floor.
    """
    rng = np.random.default_rng(seed)
    config = ModelConfig(arch=arch, num_classes=k, hidden_units=H, dropout_rate=dropout,
                         recurrent_dropout_rate=dropout, max_len=T,
                         output_activation=output_activation,
                         trainable_embedding=trainable_embedding, seed=seed)
    rows = np.zeros((vocab + 1, dim))
    rows[1:] = rng.uniform(-1.0, 1.0, size=(vocab, dim))
    params = init_params(config, rows, rng)
    for name in params:
        if name.endswith("_b"):
            params[name] = params[name] + rng.uniform(-0.5, 0.5, size=params[name].shape)
    ids = rng.integers(0, vocab + 1, size=(n, T))
    onehot = np.eye(k)[rng.integers(0, k, size=n)]
    return config, params, ids, onehot
