"""Word-level vocabulary, integer sequences, padding and one-hot labels."""
from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .errors import DataError, EmptyCorpusError, UnknownLabelError

DEFAULT_MAX_WORDS = 50_000
DEFAULT_MAX_LEN = 250
PUNCTUATION = "!\"#$%&()*+,-./:;<=>?@[\\]^_`{|}~"

_PUNCT_TABLE = str.maketrans({ch: " " for ch in PUNCTUATION})


def split_words(text: str) -> list[str]:
    """Lowercase, turn punctuation into separators, split on whitespace."""
    return text.lower().translate(_PUNCT_TABLE).split()


@dataclass
class Vocabulary:
    """Frequency-ranked word index. Index 0 is reserved for padding."""

    index_of: dict[str, int]
    max_words: int
    frequencies: dict[str, int] = field(default_factory=dict)

    def __len__(self):
        return len(self.index_of)

    @property
    def size(self):
        return len(self.index_of)

    def words(self):
        """Indexed words ordered by index."""
        return sorted(self.index_of, key=self.index_of.__getitem__)

    def to_text(self) -> str:
        return "".join(
            f"{w}\t{self.index_of[w]}\t{self.frequencies.get(w, 0)}\n" for w in self.words()
        )

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()

    def save(self, path):
        Path(path).write_bytes(self.to_text().encode("utf-8"))

    @classmethod
    def from_text(cls, text, max_words=None):
        index_of, freqs = {}, {}
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(f"vocabulary line {lineno}: expected word<TAB>index<TAB>count")
            word, idx, count = parts
            index_of[word] = int(idx)
            freqs[word] = int(count)
        if sorted(index_of.values()) != list(range(1, len(index_of) + 1)):
            raise DataError("vocabulary indices are not contiguous from 1")
        return cls(index_of, max_words or max(len(index_of), 1), freqs)

    @classmethod
    def load(cls, path, max_words=None):
        return cls.from_text(Path(path).read_bytes().decode("utf-8"), max_words)


def fit_vocabulary(texts, max_words=DEFAULT_MAX_WORDS) -> Vocabulary:
    """Rank words by corpus frequency and index the top ``max_words``.

    Equal counts keep first-occurrence order (``Counter`` preserves insertion
    order and ``sorted`` is stable).
    """
    if max_words < 1:
        raise ValueError("max_words must be positive")
    counts = Counter()
    for text in texts:
        counts.update(split_words(text))
    if not counts:
        raise EmptyCorpusError("no token survived tokenization")
    ranked = sorted(counts, key=lambda w: -counts[w])[:max_words]
    return Vocabulary({w: i for i, w in enumerate(ranked, 1)}, max_words, dict(counts))


def texts_to_sequences(vocab: Vocabulary, texts) -> list[list[int]]:
    index_of = vocab.index_of
    return [[index_of[w] for w in split_words(t) if w in index_of] for t in texts]


def pad_sequences(seqs, max_len=DEFAULT_MAX_LEN) -> np.ndarray:
    """Post-pad with 0 and keep the first ``max_len`` ids of longer rows."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    out = np.zeros((len(seqs), max_len), dtype=np.int64)
    for i, seq in enumerate(seqs):
        head = seq[:max_len]
        out[i, : len(head)] = head
    return out


@dataclass(frozen=True)
class LabelSchema:
    name: str
    classes: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        if not self.classes:
            raise ValueError("label schema needs at least one class")
        if len(set(self.classes)) != len(self.classes):
            raise ValueError(f"duplicate classes in schema {self.name!r}")

    @property
    def k(self):
        return len(self.classes)

    def index(self, label, row=None):
        try:
            return self.classes.index(label)
        except ValueError:
            raise UnknownLabelError(label, row) from None

    def encode(self, labels):
        return np.array([self.index(lab, i) for i, lab in enumerate(labels)], dtype=np.int64)


def one_hot(labels, schema: LabelSchema) -> np.ndarray:
    idx = schema.encode(labels)
    out = np.zeros((len(idx), schema.k), dtype=np.float64)
    out[np.arange(len(idx)), idx] = 1.0
    return out


class SequenceTokenizer(TransformerMixin, BaseEstimator):
    """Fit a :class:`Vocabulary` on texts and map texts to padded id matrices."""

    def __init__(self, max_words=DEFAULT_MAX_WORDS, max_len=DEFAULT_MAX_LEN):
        self.max_words = max_words
        self.max_len = max_len

    def fit(self, X, y=None):
        self.vocabulary_ = fit_vocabulary(list(X), self.max_words)
        self.n_words_ = self.vocabulary_.size
        return self

    def transform(self, X):
        check_is_fitted(self, "vocabulary_")
        return pad_sequences(texts_to_sequences(self.vocabulary_, list(X)), self.max_len)

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.input_tags.string = True
        tags.input_tags.two_d_array = False
        return tags
