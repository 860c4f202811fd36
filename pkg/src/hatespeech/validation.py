"""Input checks shared by the estimators."""
from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .errors import UnknownLabelError


def check_sequences(X, vocab_size=None):
    """Validate a padded id matrix: 2-D, integral, non-negative, ids <= vocab_size."""
    X = check_array(X, dtype=None, ensure_2d=True, ensure_min_samples=1)
    if not np.issubdtype(X.dtype, np.integer):
        if not np.all(np.equal(np.mod(X, 1), 0)):
            raise ValueError("token ids must be integers")
        X = X.astype(np.int64)
    if X.size and X.min() < 0:
        raise ValueError("token ids must be non-negative")
    if vocab_size is not None and X.size and X.max() > vocab_size:
        raise ValueError(f"token id {X.max()} exceeds vocabulary size {vocab_size}")
    return X


def check_labels(y, classes):
    """Map labels to column indices of ``classes``; unknown labels raise."""
    lookup = {c: i for i, c in enumerate(classes.tolist() if hasattr(classes, "tolist")
                                         else classes)}
    out = np.empty(len(y), dtype=np.int64)
    for row, label in enumerate(y):
        try:
            out[row] = lookup[label]
        except KeyError:
            raise UnknownLabelError(label, row) from None
    return out
