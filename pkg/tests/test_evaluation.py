import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hatespeech.errors import DataError
from hatespeech.evaluation import (
    BASELINES,
    UNAVAILABLE,
    UndefinedMetricWarning,
    compare_to_baseline,
    confusion,
    metrics,
    parse_report_csv,
    read_predictions,
    render_baseline,
    render_report,
    write_predictions,
)
from hatespeech.tokenize import LabelSchema


def oracle(truth, pred, k):
    """Per-definition metrics straight from the label lists, in exact arithmetic."""
    out = {"precision": [], "recall": [], "f1": []}
    for c in range(k):
        tp = sum(1 for t, p in zip(truth, pred) if t == c and p == c)
        fp = sum(1 for t, p in zip(truth, pred) if t != c and p == c)
        fn = sum(1 for t, p in zip(truth, pred) if t == c and p != c)
        prec = Fraction(tp, tp + fp) if tp + fp else Fraction(0)
        rec = Fraction(tp, tp + fn) if tp + fn else Fraction(0)
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else Fraction(0)
        out["precision"].append(prec)
        out["recall"].append(rec)
        out["f1"].append(f1)
    out["accuracy"] = Fraction(sum(t == p for t, p in zip(truth, pred)), len(truth))
    for m in ("precision", "recall", "f1"):
        out["macro_" + m] = sum(out[m]) / k
    return out


def assert_matches_oracle(truth, pred, k):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UndefinedMetricWarning)
        rep = metrics(confusion(truth, pred, k))
    want = oracle(truth, pred, k)
    for m in ("precision", "recall", "f1"):
        assert list(getattr(rep, m)) == [float(v) for v in want[m]]
        assert getattr(rep, "macro_" + m) == float(want["macro_" + m])
    assert rep.accuracy == float(want["accuracy"])
    return rep


def test_confusion_examples():
    assert confusion([0, 0, 1, 1], [0, 1, 1, 1], 2).tolist() == [[1, 1], [0, 2]]
    assert confusion([0, 1, 1, 2], [0, 1, 1, 2], 3).tolist() == [[1, 0, 0], [0, 2, 0], [0, 0, 1]]
    assert confusion([], [], 2).tolist() == [[0, 0], [0, 0]]
    with pytest.raises(ValueError):
        confusion([0], [0, 1], 2)
    with pytest.raises(ValueError):
        confusion([2], [0], 2)


def test_worked_example():
    rep = metrics([[1, 1], [0, 2]])
    assert rep.precision == (1.0, 2 / 3)
    assert rep.recall == (0.5, 1.0)
    assert rep.f1 == (pytest.approx(2 / 3), pytest.approx(0.8))
    assert rep.accuracy == 0.75
    assert rep.macro_f1 == pytest.approx((2 / 3 + 0.8) / 2, abs=1e-15)
    assert rep.support == (2, 2)


def test_perfect_and_degenerate():
    rep = metrics(np.diag([3, 4, 5]))
    assert rep.precision == rep.recall == rep.f1 == (1.0, 1.0, 1.0)
    with pytest.warns(UndefinedMetricWarning):
        rep = metrics([[2, 0], [3, 0]])
    assert rep.precision[1] == 0.0 and rep.f1[1] == 0.0
    with pytest.raises(DataError):
        metrics([[0, 0], [0, 0]])


@given(data=st.data())
def test_metrics_equal_oracle(data):
    k = data.draw(st.integers(2, 5))
    n = data.draw(st.integers(1, 200))
    truth = data.draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))
    pred = data.draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))
    rep = assert_matches_oracle(truth, pred, k)
    # micro P = micro R = accuracy for single-label data
    cm = rep.confusion
    tp = np.trace(cm)
    assert Fraction(int(tp), int(cm.sum(axis=0).sum())) == Fraction(int(tp), int(cm.sum())) \
        == Fraction(sum(t == p for t, p in zip(truth, pred)), n)
    assert np.array_equal(cm.sum(axis=1), np.bincount(truth, minlength=k))


@given(data=st.data())
def test_class_permutation(data):
    k = data.draw(st.integers(2, 5))
    n = data.draw(st.integers(1, 60))
    truth = data.draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))
    pred = data.draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))
    perm = data.draw(st.permutations(range(k)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UndefinedMetricWarning)
        a = metrics(confusion(truth, pred, k))
        b = metrics(confusion([perm[t] for t in truth], [perm[p] for p in pred], k))
    for c in range(k):
        assert a.f1[c] == b.f1[perm[c]] and a.precision[c] == b.precision[perm[c]]
    assert a.accuracy == b.accuracy and a.macro_f1 == b.macro_f1


SCHEMA = LabelSchema("english", ("none", "racism", "sexism"))


def sample_report():
    return metrics(confusion([0, 0, 1, 2, 2, 1], [0, 1, 1, 2, 0, 1], 3))


@pytest.mark.parametrize("fmt", ["plain", "csv", "markdown"])
def test_render_is_deterministic(fmt):
    a = render_report(sample_report(), SCHEMA, fmt)
    assert a == render_report(sample_report(), SCHEMA, fmt)
    for label in ("Precision", "Recall", "F1 Score"):
        assert label in a
    for cls in SCHEMA.classes:
        assert cls in a


def test_plain_uses_two_decimals():
    text = render_report(sample_report(), SCHEMA, "plain")
    assert "Recall           racism  1.00" in text
    assert "F1 Score         none    0.50" in text


def test_csv_roundtrip_full_precision():
    rep = sample_report()
    parsed = parse_report_csv(render_report(rep, SCHEMA, "csv"))
    for c, cls in enumerate(SCHEMA.classes):
        assert abs(parsed[("Precision", cls)] - rep.precision[c]) <= 1e-12
        assert abs(parsed[("F1 Score", cls)] - rep.f1[c]) <= 1e-12
    assert parsed[("Macro F1 Score", "all")] == rep.macro_f1


def test_render_rejects_unknown_format():
    with pytest.raises(ValueError):
        render_report(sample_report(), SCHEMA, "html")


def test_baseline_constants():
    assert BASELINES["english"] == {"precision": 0.820, "recall": 0.825, "f1": 0.823}
    assert BASELINES["italian"] == {"precision": 0.803, "recall": 0.806, "f1": 0.805}
    assert BASELINES["german"] == {"precision": 0.754, "recall": 0.762, "f1": 0.758}
    assert BASELINES["bengali"] is None


def test_compare_to_baseline():
    rep = sample_report()
    f1_row = compare_to_baseline(rep, "english")[2]
    assert (f1_row.metric, f1_row.baseline) == ("f1", 0.823)
    assert f1_row.delta == rep.macro_f1 - 0.823
    fake = rep.__class__(**{**rep.__dict__, "macro_f1": 0.79})
    assert compare_to_baseline(fake, "english")[2].delta == pytest.approx(-0.033, abs=1e-12)
    assert compare_to_baseline(rep, "german")[2].baseline == 0.758
    bn = compare_to_baseline(rep, "bengali")
    assert all(d.baseline is None and d.delta is None for d in bn)
    assert UNAVAILABLE in render_baseline(bn, "bengali")
    assert UNAVAILABLE in render_baseline(bn, "bengali", "csv")


def test_predictions_file_roundtrip(tmp_path):
    path = tmp_path / "p.csv"
    write_predictions(path, [0, 1, 2], ["none", "racism", "sexism"], ["none", "none", "sexism"])
    assert path.read_text().splitlines()[0] == "id,true_label,pred_label"
    truth, pred = read_predictions(path, SCHEMA)
    assert truth.tolist() == [0, 1, 2] and pred.tolist() == [0, 0, 2]
