"""Command-line pipeline: preprocess, fit-vocab, train, evaluate, predict, report.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import logging
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import data as data_mod
from .classifier import RecurrentClassifier
from .embed import build_matrix, load_vec_file, random_matrix
from .errors import CheckpointError, DataError, HateSpeechError, UsageError
from .evaluation import (
    REPORT_FORMATS,
    compare_to_baseline,
    evaluate,
    read_predictions,
    render_baseline,
    render_report,
    write_predictions,
)
from .preprocess import CLEAN_MODES, clean_dataset, get_cleaner
from .tokenize import LabelSchema, Vocabulary, fit_vocabulary, pad_sequences, texts_to_sequences

log = logging.getLogger("hatespeech")

OUTPUT_DIR_ENV = "HATESPEECH_OUTPUT_DIR"
CHECKPOINT_NAME = "model.ckpt"
VOCAB_NAME = "vocab.tsv"
HISTORY_NAME = "history.csv"
EXTENSIONS = {"plain": "txt", "csv": "csv", "markdown": "md"}


def default_output_dir():
    return os.environ.get(OUTPUT_DIR_ENV, "runs")


@dataclass
class RunConfig:
    data: str | None = None
    manifest: str | None = None
    clean_mode: str = "basic"
    max_words: int = 50_000
    max_len: int = 250
    embeddings: str | None = None
    embedding_dim: int = 100
    arch: str = "lstm"
    hidden_units: int = 100
    dropout: float = 0.2
    recurrent_dropout: float = 0.2
    output_activation: str = "softmax"
    epochs: int = 10
    batch_size: int = 32
    learning_rate: float = 1e-3
    seed: int = 0
    stratify: bool = False
    out: str | None = None

    @classmethod
    def resolve(cls, file_values, overrides):
        """Defaults, then config-file values, then command-line overrides."""
        kwargs = {}
        types = {f.name: type(f.default) for f in fields(cls)}
        for source in (file_values, overrides):
            for key, value in source.items():
                key = key.replace("-", "_")
                if key not in types:
                    raise UsageError(f"unknown config key {key!r}")
                if value is None:
                    continue
                kind = types[key]
                try:
                    if kind is bool:
                        value = value if isinstance(value, bool) else \
                            str(value).lower() in ("1", "true", "yes", "on")
                    elif kind in (int, float):
                        value = kind(value)
                except ValueError:
                    raise UsageError(f"config key {key!r}: cannot parse {value!r}") from None
                kwargs[key] = value
        cfg = cls(**kwargs)
        if cfg.out is None:
            cfg.out = default_output_dir()
        return cfg

    def validate(self):
        if not self.data:
            raise UsageError("no dataset given (--data or data= in the config file)")
        if not self.manifest:
            raise UsageError("no manifest given (--manifest or manifest= in the config file)")
        if not Path(self.data).is_file():
            raise DataError(f"{self.data}: no such file")
        if self.embeddings and not Path(self.embeddings).is_file():
            raise DataError(f"{self.embeddings}: no such file")
        if self.clean_mode not in CLEAN_MODES:
            raise UsageError(f"clean mode must be one of {CLEAN_MODES}")

    def to_text(self):
        return "".join(f"{k}={'' if v is None else v}\n" for k, v in asdict(self).items())


def read_config_file(path):
    values = {}
    p = Path(path)
    if not p.is_file():
        raise DataError(f"{path}: no such config file")
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip() or None
    return values


@contextlib.contextmanager
def stage(name):
    try:
        yield
    except HateSpeechError as exc:
        exc.args = (f"[{name}] {exc}",)
        raise


def _write(path, text):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_bytes(text.encode("utf-8"))


def _load_clean(path, manifest, mode, check_counts=True):
    rows = data_mod.load_csv(path, manifest, check_counts=check_counts)
    if not rows:
        raise DataError(f"{path}: no rows")
    cleaned, summary = clean_dataset(rows, mode)
    if summary.n_emptied:
        log.warning("%s: %d rows are empty after cleaning", path, summary.n_emptied)
    return cleaned


def _sequences(vocab, texts, max_len):
    return pad_sequences(texts_to_sequences(vocab, texts), max_len)


# -- commands ---------------------------------------------------------------

def cmd_preprocess(args):
    manifest = data_mod.get_manifest(args.manifest) if args.manifest else None
    rows = data_mod.load_csv(args.input, manifest)
    if not rows:
        raise DataError(f"{args.input}: no rows")
    cleaned, summary = clean_dataset(rows, args.clean_mode)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    data_mod.write_csv(cleaned, out)
    print(f"{out}: {summary}")
    return summary


def cmd_fit_vocab(args):
    texts = [rec["text"] for _, rec in data_mod.read_csv_rows(args.input, ("text",))]
    vocab = fit_vocabulary(texts, args.max_words)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    vocab.save(out)
    print(f"{out}: {vocab.size} words (max_words={args.max_words})")
    return vocab


def _run_config_from_args(args):
    file_values = read_config_file(args.config) if args.config else {}
    overrides = {f.name: getattr(args, f.name, None) for f in fields(RunConfig)}
    cfg = RunConfig.resolve(file_values, overrides)
    cfg.validate()
    return cfg


def cmd_train(args):
    cfg = _run_config_from_args(args)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    with stage("data"):
        manifest = data_mod.get_manifest(cfg.manifest)
        cleaned = _load_clean(cfg.data, manifest, cfg.clean_mode)
        split = data_mod.split_dataset(cleaned, cfg.seed, cfg.stratify)
    log.info("split sizes train=%d val=%d test=%d", len(split.train), len(split.val),
             len(split.test))
    with stage("vocab"):
        vocab = fit_vocabulary([r.text for r in split.train], cfg.max_words)
    with stage("embedding"):
        if cfg.embeddings:
            embedding = build_matrix(vocab, load_vec_file(cfg.embeddings))
            log.info("embedding coverage %.4f", embedding.coverage)
        else:
            embedding = random_matrix(vocab, cfg.embedding_dim, cfg.seed)
    with stage("train"):
        X_train = _sequences(vocab, [r.text for r in split.train], cfg.max_len)
        X_val = _sequences(vocab, [r.text for r in split.val], cfg.max_len)
        clf = RecurrentClassifier(
            arch=cfg.arch, hidden_units=cfg.hidden_units, dropout=cfg.dropout,
            recurrent_dropout=cfg.recurrent_dropout, embeddings=embedding,
            trainable_embedding=cfg.embeddings is None,
            output_activation=cfg.output_activation, epochs=cfg.epochs,
            batch_size=cfg.batch_size, learning_rate=cfg.learning_rate,
            classes=list(manifest.schema.classes), seed=cfg.seed)
        try:
            clf.fit(X_train, [r.label for r in split.train],
                    validation_data=(X_val, [r.label for r in split.val]) if len(X_val) else None)
        except HateSpeechError as exc:
            history = getattr(exc, "history", None)
            if history is not None:
                _write(out / HISTORY_NAME, history.to_csv())
            raise
    vocab.save(out / VOCAB_NAME)
    clf.save(out / CHECKPOINT_NAME, schema=manifest.name, clean_mode=cfg.clean_mode,
             vocab_hash=vocab.digest(), data=cfg.data, manifest=cfg.manifest,
             split_seed=cfg.seed, stratify=cfg.stratify, max_words=cfg.max_words,
             embedding_source=cfg.embeddings or "random",
             coverage=repr(embedding.coverage))
    _write(out / HISTORY_NAME, clf.history_.to_csv())
    _write(out / "run.cfg", cfg.to_text())
    print(f"{out}: trained {cfg.arch} for {cfg.epochs} epochs; "
          f"final train_acc={clf.history_.train_accuracy[-1] if clf.history_.train_accuracy else float('nan'):.4f}")
    return clf


def _load_model(args):
    model_dir = Path(args.model_dir) if args.model_dir else None
    ckpt = Path(args.checkpoint) if args.checkpoint else model_dir / CHECKPOINT_NAME
    vocab_path = Path(args.vocab) if args.vocab else ckpt.parent / VOCAB_NAME
    for p in (ckpt, vocab_path):
        if not p.is_file():
            raise DataError(f"{p}: no such file")
    clf, meta = RecurrentClassifier.load(ckpt)
    vocab = Vocabulary.load(vocab_path, int(meta.get("max_words", 0)) or None)
    if vocab.digest() != meta.get("vocab_hash"):
        raise CheckpointError(f"{vocab_path} does not match the vocabulary of {ckpt}")
    schema = LabelSchema(meta.get("schema", "custom"), tuple(meta["classes"].split(",")))
    return clf, meta, vocab, schema


def _emit_reports(report, schema, formats, out_dir, model_name):
    texts = {}
    for fmt in formats:
        text = render_report(report, schema, fmt, model=model_name)
        text += "\n" if fmt != "csv" else ""
        deltas = compare_to_baseline(report, schema.name)
        baseline = render_baseline(deltas, schema.name, fmt)
        texts[fmt] = (text, baseline)
        if out_dir is not None:
            _write(Path(out_dir) / f"report.{EXTENSIONS[fmt]}", text if fmt == "csv" else text + baseline)
            if fmt == "csv":
                _write(Path(out_dir) / "baseline.csv", baseline)
    return texts


def _formats(value):
    formats = [f.strip() for f in value.split(",") if f.strip()]
    bad = [f for f in formats if f not in REPORT_FORMATS]
    if bad or not formats:
        raise UsageError(f"--format takes a comma list of {REPORT_FORMATS}")
    return formats


def cmd_evaluate(args):
    formats = _formats(args.format)
    clf, meta, vocab, schema = _load_model(args)
    manifest = data_mod.DatasetManifest(schema.name, schema)
    mode = meta["clean_mode"]
    with stage("data"):
        if args.test:
            rows = _load_clean(args.test, manifest, mode)
        else:
            cleaned = _load_clean(args.data or meta["data"], manifest, mode, check_counts=False)
            split = data_mod.split_dataset(cleaned, int(meta["split_seed"]),
                                           meta.get("stratify") == "True")
            rows = split.test
    X = _sequences(vocab, [r.text for r in rows], clf.config_.max_len)
    pred = clf.predict(X)
    truth = [r.label for r in rows]
    report = evaluate(schema.encode(truth), schema.encode(pred), schema)
    out_dir = Path(args.out) if args.out else Path(args.model_dir or Path(args.checkpoint).parent)
    texts = _emit_reports(report, schema, formats, out_dir, clf.config_.arch.upper())
    write_predictions(out_dir / "predictions.csv", range(len(rows)), truth, pred)
    plain = texts.get("plain") or next(iter(texts.values()))
    sys.stdout.write(plain[0] + plain[1])
    return report


def cmd_predict(args):
    clf, meta, vocab, schema = _load_model(args)
    clean = get_cleaner(meta["clean_mode"])
    texts = [rec["text"] for _, rec in data_mod.read_csv_rows(args.input, ("text",))]
    X = _sequences(vocab, [clean(t) for t in texts], clf.config_.max_len)
    probs = clf.predict_proba(X) if texts else []
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["text", "pred_label"] + [f"p_{c}" for c in schema.classes])
        for text, row in zip(texts, probs):
            writer.writerow([text, schema.classes[int(row.argmax())]] + [repr(float(p)) for p in row])
    print(f"{out}: {len(texts)} predictions")
    return probs


def cmd_report(args):
    formats = _formats(args.format)
    manifest = data_mod.get_manifest(args.manifest)
    truth, pred = read_predictions(args.predictions, manifest.schema)
    report = evaluate(truth, pred, manifest.schema)
    language = args.language or manifest.name
    schema = LabelSchema(language, manifest.schema.classes)
    texts = _emit_reports(report, schema, formats, args.out, args.model_name)
    if args.out is None:
        for fmt in formats:
            sys.stdout.write(texts[fmt][0] + texts[fmt][1])
    else:
        plain = texts.get("plain") or next(iter(texts.values()))
        sys.stdout.write(plain[0] + plain[1])
    return report


# -- argument parsing -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(UsageError.exit_code, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="hatespeech", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("preprocess", help="clean a raw text,label CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--clean-mode", choices=CLEAN_MODES, default="basic")
    p.add_argument("--manifest", help="built-in name or manifest file; validates labels")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("fit-vocab", help="fit a vocabulary on a cleaned CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--max-words", type=int, default=50_000)
    p.set_defaults(func=cmd_fit_vocab)

    p = sub.add_parser("train", help="split, fit vocabulary and embedding, train")
    p.add_argument("--config", help="key=value run config; flags override it")
    p.add_argument("--data")
    p.add_argument("--manifest")
    p.add_argument("--clean-mode", choices=CLEAN_MODES)
    p.add_argument("--max-words", type=int)
    p.add_argument("--max-len", type=int)
    p.add_argument("--embeddings", help=".vec file of pretrained vectors (frozen)")
    p.add_argument("--embedding-dim", type=int, help="dim of the random trainable embedding")
    p.add_argument("--arch", choices=("lstm", "bilstm"))
    p.add_argument("--hidden-units", type=int)
    p.add_argument("--dropout", type=float)
    p.add_argument("--recurrent-dropout", type=float)
    p.add_argument("--output-activation", choices=("softmax", "sigmoid"))
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--learning-rate", "--lr", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--stratify", action="store_const", const=True)
    p.add_argument("--out", help=f"output directory (default ${OUTPUT_DIR_ENV} or ./runs)")
    p.set_defaults(func=cmd_train)

    for name, func, helptext in (("evaluate", cmd_evaluate, "score a trained model"),
                                 ("predict", cmd_predict, "label new texts")):
        p = sub.add_parser(name, help=helptext)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--model-dir")
        src.add_argument("--checkpoint")
        p.add_argument("--vocab", help="vocabulary file (default: next to the checkpoint)")
        p.set_defaults(func=func)
    evaluate_p, predict_p = sub.choices["evaluate"], sub.choices["predict"]
    evaluate_p.add_argument("--test", help="explicit test CSV instead of the seeded split")
    evaluate_p.add_argument("--data", help="override the dataset path stored in the checkpoint")
    evaluate_p.add_argument("--format", default="plain,csv,markdown")
    evaluate_p.add_argument("--out", help="report directory (default: the model directory)")
    predict_p.add_argument("--in", dest="input", required=True)
    predict_p.add_argument("--out", dest="output", required=True)

    p = sub.add_parser("report", help="report on an id,true_label,pred_label CSV")
    p.add_argument("--predictions", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--language", help="baseline language (default: manifest name)")
    p.add_argument("--format", default="plain")
    p.add_argument("--model-name", default="model")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)
    try:
        args.func(args)
    except HateSpeechError as exc:
        print(f"hatespeech {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"hatespeech {args.command}: error: {exc}", file=sys.stderr)
        return UsageError.exit_code
    except OSError as exc:
        print(f"hatespeech {args.command}: error: {exc}", file=sys.stderr)
        return DataError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
