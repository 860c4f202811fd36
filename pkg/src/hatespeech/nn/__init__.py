"""From-scratch recurrent sequence classifier in numpy."""
from .checkpoint import load_checkpoint, save_checkpoint
from .functional import (
    cross_entropy,
    dense_forward,
    dropout_forward,
    embedding_forward,
    sigmoid,
    softmax,
)
from .gradcheck import GradCheckReport, gradient_check
from .lstm import bilstm_forward, lstm_forward
from .model import ModelConfig, backward, forward, init_params, loss_and_grads
from .optim import AdamState, adam_step
from .training import TrainHistory, predict, predict_proba, train

__all__ = [
    "AdamState", "GradCheckReport", "ModelConfig", "TrainHistory", "adam_step", "backward",
    "bilstm_forward", "cross_entropy", "dense_forward", "dropout_forward", "embedding_forward",
    "forward", "gradient_check", "init_params", "load_checkpoint", "loss_and_grads",
    "lstm_forward", "predict", "predict_proba", "save_checkpoint", "sigmoid", "softmax", "train",
]
