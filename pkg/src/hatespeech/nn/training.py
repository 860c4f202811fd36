"""Minibatch training loop and inference."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import NumericError
from .functional import cross_entropy
from .model import ModelConfig, backward, forward, init_params
from .optim import AdamState, adam_step

log = logging.getLogger(__name__)

HISTORY_COLUMNS = ("epoch", "train_loss", "train_acc", "val_loss", "val_acc")
PREDICT_CHUNK = 256


@dataclass
class TrainHistory:
    train_loss: list[float] = field(default_factory=list)
    train_accuracy: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    val_accuracy: list[float] = field(default_factory=list)

    def __len__(self):
        return len(self.train_loss)

    def append(self, train_loss, train_acc, val_loss, val_acc):
        self.train_loss.append(train_loss)
        self.train_accuracy.append(train_acc)
        self.val_loss.append(val_loss)
        self.val_accuracy.append(val_acc)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(HISTORY_COLUMNS)
        for i in range(len(self)):
            writer.writerow([i + 1] + [repr(float(v)) for v in (
                self.train_loss[i], self.train_accuracy[i], self.val_loss[i], self.val_accuracy[i])])
        return buf.getvalue()


def make_rngs(seed):
    """Independent generators for initialisation, shuffling and dropout."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3)]


def _accuracy(probs, onehot):
    return float(np.mean(np.argmax(probs, axis=1) == np.argmax(onehot, axis=1)))


def evaluate_loss(params, config, ids, onehot):
    probs = predict_proba(params, config, ids)
    return cross_entropy(probs, onehot, config.loss), _accuracy(probs, onehot)


def train(config: ModelConfig, embedding_rows, X_train, Y_train, X_val=None, Y_val=None,
          params=None):
    """Fit with Adam on shuffled minibatches.

    ``Y_*`` are one-hot matrices. Train metrics are sample-weighted means over
    the epoch's minibatches in training mode; validation metrics are computed
    in inference mode after each epoch (NaN when no validation set is given).
    Returns ``(params, history)``. On numeric failure the raised
    :class:`NumericError` carries ``history`` and ``params`` up to that point.
    """
    init_rng, shuffle_rng, dropout_rng = make_rngs(config.seed)
    if params is None:
        params = init_params(config, embedding_rows, init_rng)
    history = TrainHistory()
    state = AdamState()
    n = len(X_train)
    for epoch in range(config.epochs):
        order = shuffle_rng.permutation(n)
        loss_sum = correct = 0.0
        try:
            for start in range(0, n, config.batch_size):
                idx = order[start: start + config.batch_size]
                xb, yb = X_train[idx], Y_train[idx]
                probs, cache = forward(params, config, xb, training=True, rng=dropout_rng)
                loss = cross_entropy(probs, yb, config.loss)
                if not np.isfinite(loss):
                    raise NumericError(f"non-finite loss in epoch {epoch + 1}")
                grads = backward(params, config, cache, yb)
                adam_step(params, grads, state, lr=config.learning_rate)
                loss_sum += loss * len(idx)
                correct += _accuracy(probs, yb) * len(idx)
        except NumericError as exc:
            exc.history, exc.params = history, params
            raise
        if X_val is not None and len(X_val):
            val_loss, val_acc = evaluate_loss(params, config, X_val, Y_val)
        else:
            val_loss = val_acc = float("nan")
        history.append(loss_sum / n, correct / n, val_loss, val_acc)
        log.info("epoch %d/%d loss=%.4f acc=%.4f val_loss=%.4f val_acc=%.4f", epoch + 1,
                 config.epochs, history.train_loss[-1], history.train_accuracy[-1],
                 val_loss, val_acc)
    return params, history


def predict_proba(params, config, ids):
    ids = np.asarray(ids)
    chunks = [forward(params, config, ids[s: s + PREDICT_CHUNK])[0]
              for s in range(0, len(ids), PREDICT_CHUNK)]
    if not chunks:
        return np.zeros((0, config.num_classes))
    return np.concatenate(chunks)


def predict(params, config, ids):
    """Inference-mode probabilities and argmax labels (ties go to the lower index)."""
    probs = predict_proba(params, config, ids)
    return probs, np.argmax(probs, axis=1)
