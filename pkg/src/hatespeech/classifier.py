"""scikit-learn compatible recurrent text classifier."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .embed import EmbeddingMatrix, random_matrix
from .nn import checkpoint
from .nn.model import ModelConfig
from .nn.training import predict_proba, train
from .validation import check_labels, check_sequences

DEFAULT_EMBEDDING_DIM = 100


class RecurrentClassifier(ClassifierMixin, BaseEstimator):
    """Embedding -> dropout -> LSTM or BiLSTM -> dense classifier.

    ``X`` is a padded integer id matrix (see
    :class:`~hatespeech.tokenize.SequenceTokenizer`). Class labels may be any
    hashables; their column order is ``classes`` when given, otherwise the
    sorted unique labels seen in ``fit``.

    With ``embeddings=None`` a trainable random embedding of
    ``embedding_dim`` columns is created for ``vocab_size`` words (inferred
    from the largest id in ``X`` when not given). A pretrained
    :class:`~hatespeech.embed.EmbeddingMatrix` is frozen unless
    ``trainable_embedding=True``.
    """

    def __init__(self, arch="lstm", hidden_units=100, dropout=0.2, recurrent_dropout=0.2,
                 embeddings=None, embedding_dim=DEFAULT_EMBEDDING_DIM, vocab_size=None,
                 trainable_embedding=None, output_activation="softmax", epochs=10,
                 batch_size=32, learning_rate=1e-3, classes=None, seed=0):
        self.arch = arch
        self.hidden_units = hidden_units
        self.dropout = dropout
        self.recurrent_dropout = recurrent_dropout
        self.embeddings = embeddings
        self.embedding_dim = embedding_dim
        self.vocab_size = vocab_size
        self.trainable_embedding = trainable_embedding
        self.output_activation = output_activation
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.classes = classes
        self.seed = seed

    def _embedding_rows(self, X):
        if self.embeddings is not None:
            rows = self.embeddings.rows if isinstance(self.embeddings, EmbeddingMatrix) \
                else np.asarray(self.embeddings, dtype=np.float64)
            trainable = bool(self.trainable_embedding)
        else:
            n_words = self.vocab_size if self.vocab_size is not None else int(X.max(initial=0))
            rows = random_matrix(n_words, self.embedding_dim, self.seed).rows
            trainable = self.trainable_embedding is None or bool(self.trainable_embedding)
        return rows, trainable

    def _config(self, max_len, trainable):
        return ModelConfig(
            arch=self.arch, num_classes=len(self.classes_), hidden_units=self.hidden_units,
            dropout_rate=self.dropout, recurrent_dropout_rate=self.recurrent_dropout,
            max_len=max_len, output_activation=self.output_activation,
            trainable_embedding=trainable, epochs=self.epochs, batch_size=self.batch_size,
            learning_rate=self.learning_rate, seed=self.seed,
        )

    def _onehot(self, y):
        return np.eye(len(self.classes_))[check_labels(y, self.classes_)]

    def fit(self, X, y, validation_data=None):
        X = check_sequences(X)
        y = list(y)
        if len(y) != len(X):
            raise ValueError(f"X has {len(X)} rows but y has {len(y)} labels")
        self.classes_ = np.array(self.classes if self.classes is not None else sorted(set(y)))
        Y = self._onehot(y)
        rows, trainable = self._embedding_rows(X)
        check_sequences(X, vocab_size=rows.shape[0] - 1)
        self.config_ = self._config(X.shape[1], trainable)
        X_val = Y_val = None
        if validation_data is not None:
            X_val = check_sequences(validation_data[0], vocab_size=rows.shape[0] - 1)
            Y_val = self._onehot(validation_data[1])
        self.params_, self.history_ = train(self.config_, rows, X, Y, X_val, Y_val)
        self.n_features_in_ = X.shape[1]
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "params_")
        X = check_sequences(X, vocab_size=self.params_["embedding"].shape[0] - 1)
        return predict_proba(self.params_, self.config_, X)

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    def save(self, path, **meta):
        check_is_fitted(self, "params_")
        meta = {"classes": ",".join(map(str, self.classes_)), **meta}
        checkpoint.save_checkpoint(path, self.config_, self.params_, meta)

    @classmethod
    def load(cls, path):
        """Rebuild a fitted classifier; returns ``(clf, meta)``."""
        config, params, meta = checkpoint.load_checkpoint(path)
        clf = cls(arch=config.arch, hidden_units=config.hidden_units,
                  dropout=config.dropout_rate, recurrent_dropout=config.recurrent_dropout_rate,
                  embedding_dim=params["embedding"].shape[1],
                  vocab_size=params["embedding"].shape[0] - 1,
                  trainable_embedding=config.trainable_embedding,
                  output_activation=config.output_activation, epochs=config.epochs,
                  batch_size=config.batch_size, learning_rate=config.learning_rate,
                  classes=meta["classes"].split(","), seed=config.seed)
        clf.classes_ = np.array(clf.classes)
        clf.config_, clf.params_ = config, params
        clf.n_features_in_ = config.max_len
        return clf, meta
