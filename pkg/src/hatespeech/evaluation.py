"""Confusion matrices, per-class metrics, report rendering and baseline deltas."""
from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .data import read_csv_rows
from .errors import DataError
from .tokenize import LabelSchema

REPORT_FORMATS = ("plain", "csv", "markdown")
UNAVAILABLE = "baseline unavailable"

# Average precision / recall / F1 of the reference multilingual FastText+LSTM system.
BASELINES = {
    "english": {"precision": 0.820, "recall": 0.825, "f1": 0.823},
    "italian": {"precision": 0.803, "recall": 0.806, "f1": 0.805},
    "german": {"precision": 0.754, "recall": 0.762, "f1": 0.758},
    "bengali": None,
}


class UndefinedMetricWarning(UserWarning):
    pass


def confusion(truth, pred, k) -> np.ndarray:
    """``cm[i, j]`` counts rows of true class ``i`` predicted as ``j``."""
    truth = np.asarray(truth, dtype=np.int64)
    pred = np.asarray(pred, dtype=np.int64)
    if truth.shape != pred.shape:
        raise ValueError(f"length mismatch: {truth.size} truths vs {pred.size} predictions")
    for name, arr in (("truth", truth), ("pred", pred)):
        if arr.size and (arr.min() < 0 or arr.max() >= k):
            raise ValueError(f"{name} contains a class index outside [0, {k})")
    cm = np.zeros((k, k), dtype=np.int64)
    np.add.at(cm, (truth, pred), 1)
    return cm


def _ratio(num, den):
    return Fraction(int(num), int(den)) if den else None


@dataclass(frozen=True)
class EvaluationReport:
    confusion: np.ndarray
    precision: tuple[float, ...]
    recall: tuple[float, ...]
    f1: tuple[float, ...]
    support: tuple[int, ...]
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float

    @property
    def k(self):
        return len(self.support)


def metrics(cm) -> EvaluationReport:
    """Per-class and macro precision/recall/F1 plus accuracy.

    Ratios are formed exactly with :class:`fractions.Fraction` and rounded once,
    so every value is the correctly rounded float of its definition. Undefined
    ratios (zero denominator) are reported as 0 with an
    :class:`UndefinedMetricWarning`.
    """
    cm = np.asarray(cm, dtype=np.int64)
    k = cm.shape[0]
    if cm.shape != (k, k) or k < 2:
        raise ValueError("confusion matrix must be square with k >= 2")
    total = int(cm.sum())
    if total == 0:
        raise DataError("cannot compute metrics on an empty confusion matrix")
    tp = np.diag(cm)
    predicted = cm.sum(axis=0)
    support = cm.sum(axis=1)
    prec, rec, f1 = [], [], []
    undefined = []
    for c in range(k):
        p = _ratio(tp[c], predicted[c])
        r = _ratio(tp[c], support[c])
        f = _ratio(2 * tp[c], support[c] + predicted[c])
        if p is None:
            undefined.append(f"precision[{c}]")
        if r is None:
            undefined.append(f"recall[{c}]")
        prec.append(p or Fraction(0))
        rec.append(r or Fraction(0))
        f1.append(f or Fraction(0))
    if undefined:
        warnings.warn("zero denominator, set to 0: " + ", ".join(undefined),
                      UndefinedMetricWarning, stacklevel=2)
    return EvaluationReport(
        confusion=cm,
        precision=tuple(float(v) for v in prec),
        recall=tuple(float(v) for v in rec),
        f1=tuple(float(v) for v in f1),
        support=tuple(int(s) for s in support),
        accuracy=float(Fraction(int(tp.sum()), total)),
        macro_precision=float(sum(prec) / k),
        macro_recall=float(sum(rec) / k),
        macro_f1=float(sum(f1) / k),
    )


def evaluate(truth, pred, schema: LabelSchema) -> EvaluationReport:
    return metrics(confusion(truth, pred, schema.k))


def _metric_rows(report, schema):
    for title, values in (("Precision", report.precision), ("Recall", report.recall),
                          ("F1 Score", report.f1)):
        for cls, v in zip(schema.classes, values):
            yield title, cls, v
    for cls, s in zip(schema.classes, report.support):
        yield "Support", cls, s
    yield "Accuracy", "all", report.accuracy
    yield "Macro Precision", "all", report.macro_precision
    yield "Macro Recall", "all", report.macro_recall
    yield "Macro F1 Score", "all", report.macro_f1


def _fmt(v):
    return str(v) if isinstance(v, int) else f"{v:.2f}"


def render_report(report: EvaluationReport, schema: LabelSchema, fmt="plain", model="model"):
    """Render a metric table. ``plain`` and ``markdown`` round to two decimals;
    ``csv`` keeps full precision."""
    rows = list(_metric_rows(report, schema))
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["metric", "class", model])
        for metric, cls, v in rows:
            writer.writerow([metric, cls, v if isinstance(v, int) else repr(float(v))])
        return buf.getvalue()
    if fmt == "markdown":
        lines = [f"| Metric | Class | {model} |", "|---|---|---:|"]
        lines += [f"| {m} | {c} | {_fmt(v)} |" for m, c, v in rows]
        lines += ["", "Confusion matrix (rows: true, columns: predicted)", ""]
        lines += ["| | " + " | ".join(schema.classes) + " |",
                  "|---|" + "---:|" * schema.k]
        lines += [f"| {cls} | " + " | ".join(str(x) for x in row) + " |"
                  for cls, row in zip(schema.classes, report.confusion)]
        return "\n".join(lines) + "\n"
    if fmt == "plain":
        w_m = max(len("Metric"), *(len(m) for m, _, _ in rows))
        w_c = max(len("Class"), *(len(c) for _, c, _ in rows))
        lines = [f"{'Metric':<{w_m}}  {'Class':<{w_c}}  {model}"]
        lines += [f"{m:<{w_m}}  {c:<{w_c}}  {_fmt(v)}" for m, c, v in rows]
        lines += ["", "Confusion matrix (rows: true, columns: predicted)"]
        w = max(len(c) for c in schema.classes)
        lines.append(" " * (w + 2) + "  ".join(f"{c:>{w}}" for c in schema.classes))
        for cls, row in zip(schema.classes, report.confusion):
            lines.append(f"{cls:<{w}}  " + "  ".join(f"{x:>{w}}" for x in row))
        return "\n".join(lines) + "\n"
    raise ValueError(f"format must be one of {REPORT_FORMATS}, got {fmt!r}")


def parse_report_csv(text):
    """Inverse of the csv rendering: ``{(metric, class): value}``."""
    reader = csv.reader(io.StringIO(text))
    next(reader)
    return {(m, c): float(v) for m, c, v in reader}


@dataclass(frozen=True)
class BaselineDelta:
    metric: str
    ours: float
    baseline: float | None
    delta: float | None


def compare_to_baseline(report: EvaluationReport, language):
    """Macro P/R/F1 against the reference baseline for ``language``.

    Languages without a published baseline (or unknown ones) yield rows whose
    ``baseline`` and ``delta`` are None.
    """
    base = BASELINES.get(language)
    ours = {"precision": report.macro_precision, "recall": report.macro_recall,
            "f1": report.macro_f1}
    return [BaselineDelta(m, v, base[m] if base else None,
                          v - base[m] if base else None) for m, v in ours.items()]


def render_baseline(deltas, language, fmt="plain"):
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["metric", "ours", "baseline", "delta"])
        for d in deltas:
            writer.writerow([d.metric, repr(d.ours),
                             UNAVAILABLE if d.baseline is None else repr(d.baseline),
                             "" if d.delta is None else repr(d.delta)])
        return buf.getvalue()
    lines = [f"Baseline comparison ({language}, macro averages)"]
    if fmt == "markdown":
        lines = [lines[0], "", "| Metric | Ours | Baseline | Delta |", "|---|---:|---:|---:|"]
    for d in deltas:
        base = UNAVAILABLE if d.baseline is None else f"{d.baseline:.3f}"
        delta = "" if d.delta is None else f"{d.delta:+.3f}"
        if fmt == "markdown":
            lines.append(f"| {d.metric} | {d.ours:.3f} | {base} | {delta} |")
        else:
            lines.append(f"{d.metric:<10} ours={d.ours:.3f} baseline={base} {delta}".rstrip())
    return "\n".join(lines) + "\n"


PREDICTION_COLUMNS = ("id", "true_label", "pred_label")


def write_predictions(path, ids, truth, pred):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PREDICTION_COLUMNS)
        writer.writerows(zip(ids, truth, pred))


def read_predictions(path, schema: LabelSchema):
    """Read an ``id,true_label,pred_label`` CSV into class-index arrays."""
    truth, pred = [], []
    for lineno, row in read_csv_rows(path, PREDICTION_COLUMNS):
        truth.append(schema.index(row["true_label"], lineno))
        pred.append(schema.index(row["pred_label"], lineno))
    return np.array(truth, dtype=np.int64), np.array(pred, dtype=np.int64)
