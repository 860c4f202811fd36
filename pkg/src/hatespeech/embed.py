"""Pretrained word vectors (textual ``.vec`` format) and embedding matrices."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import VectorFormatError
from .tokenize import Vocabulary

log = logging.getLogger(__name__)

RANDOM_INIT_SCALE = 0.05


@dataclass
class WordVectors:
    dim: int
    vectors: dict[str, np.ndarray]
    duplicates: int = 0

    def __len__(self):
        return len(self.vectors)

    def __contains__(self, word):
        return word in self.vectors


@dataclass
class EmbeddingMatrix:
    """Row ``i`` holds the vector for vocabulary index ``i``; row 0 is padding."""

    rows: np.ndarray
    words_not_found: list[str] = field(default_factory=list)

    @property
    def dim(self):
        return self.rows.shape[1]

    @property
    def vocab_size(self):
        return self.rows.shape[0] - 1

    @property
    def coverage(self):
        if self.vocab_size == 0:
            return 0.0
        return (self.vocab_size - len(self.words_not_found)) / self.vocab_size


def _is_header(fields):
    if len(fields) != 2:
        return False
    try:
        int(fields[0]), int(fields[1])
    except ValueError:
        return False
    return True


def load_vec_file(path) -> WordVectors:
    """Parse a ``.vec`` file: optional ``count dim`` header, then ``word v1 ... vd``.

    Fields are separated by single spaces so words may contain other Unicode
    whitespace. Trailing spaces are tolerated. When a word repeats, the last
    occurrence wins and ``duplicates`` counts the overwrites.
    """
    dim = None
    vectors: dict[str, np.ndarray] = {}
    duplicates = 0
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n").rstrip(" ")
            if not line:
                continue
            fields = line.split(" ")
            if lineno == 1 and _is_header(fields):
                dim = int(fields[1])
                continue
            word, values = fields[0], fields[1:]
            if dim is None:
                if not values:
                    raise VectorFormatError("row has no vector values", lineno)
                dim = len(values)
            if len(values) != dim:
                raise VectorFormatError(
                    f"expected {dim} values for {word!r}, found {len(values)}", lineno
                )
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError as exc:
                raise VectorFormatError(f"malformed number ({exc})", lineno) from None
            if word in vectors:
                duplicates += 1
            vectors[word] = vec
    if dim is None:
        raise VectorFormatError("file contains no vectors")
    if duplicates:
        log.warning("%s: %d duplicate words, last occurrence kept", path, duplicates)
    return WordVectors(dim, vectors, duplicates)


def write_vec_file(vectors: WordVectors, path):
    """Write with a header and 17 significant digits so re-parsing is exact."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(vectors.vectors)} {vectors.dim}\n")
        for word, vec in vectors.vectors.items():
            fh.write(word + " " + " ".join(f"{v:.17g}" for v in vec) + "\n")


def build_matrix(vocab: Vocabulary, vectors: WordVectors) -> EmbeddingMatrix:
    rows = np.zeros((vocab.size + 1, vectors.dim), dtype=np.float64)
    missing = []
    for word in vocab.words():
        vec = vectors.vectors.get(word)
        if vec is None:
            missing.append(word)
        else:
            rows[vocab.index_of[word]] = vec
    matrix = EmbeddingMatrix(rows, missing)
    log.info("embedding coverage %.4f (%d of %d words missing)",
             matrix.coverage, len(missing), vocab.size)
    return matrix


def random_matrix(vocab: Vocabulary | int, dim: int, seed: int) -> EmbeddingMatrix:
    """Uniform(-0.05, 0.05) rows for every indexed word; zero padding row."""
    if dim < 1:
        raise ValueError("embedding dim must be >= 1")
    n_words = vocab if isinstance(vocab, int) else vocab.size
    rng = np.random.default_rng(seed)
    rows = np.zeros((n_words + 1, dim), dtype=np.float64)
    rows[1:] = rng.uniform(-RANDOM_INIT_SCALE, RANDOM_INIT_SCALE, size=(n_words, dim))
    return EmbeddingMatrix(rows, [])
