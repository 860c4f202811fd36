"""Multilingual hate-speech classification with from-scratch LSTM/BiLSTM models."""
from .classifier import RecurrentClassifier
from .data import (
    BUILTIN_MANIFESTS,
    DatasetManifest,
    DatasetSplit,
    get_manifest,
    load_csv,
    register_builtin_schemas,
    split_dataset,
)
from .embed import EmbeddingMatrix, WordVectors, build_matrix, load_vec_file, random_matrix
from .evaluation import EvaluationReport, compare_to_baseline, confusion, metrics, render_report
from .preprocess import TextCleaner, clean_basic, clean_dataset, clean_rich
from .tokenize import (
    LabelSchema,
    SequenceTokenizer,
    Vocabulary,
    fit_vocabulary,
    one_hot,
    pad_sequences,
    texts_to_sequences,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_MANIFESTS", "DatasetManifest", "DatasetSplit", "EmbeddingMatrix",
    "EvaluationReport", "LabelSchema", "RecurrentClassifier", "SequenceTokenizer",
    "TextCleaner", "Vocabulary", "WordVectors", "build_matrix", "clean_basic",
    "clean_dataset", "clean_rich", "compare_to_baseline", "confusion", "fit_vocabulary",
    "get_manifest", "load_csv", "load_vec_file", "metrics", "one_hot", "pad_sequences",
    "random_matrix", "register_builtin_schemas", "render_report", "split_dataset",
    "texts_to_sequences",
]
