import csv
import random

import pytest

WORDS = {
    "none": "good day lovely weather friends coffee music".split(),
    "racism": "go back country foreigners invaders border".split(),
    "sexism": "women kitchen cannot drive girls wives".split(),
}


def write_synthetic_csv(path, n=60, seed=0, decorate=True):
    """Three-class corpus with disjoint class vocabularies, plus tweet noise."""
    rng = random.Random(seed)
    classes = list(WORDS)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["text", "label"])
        for i in range(n):
            label = classes[i % 3]
            text = " ".join(rng.choice(WORDS[label]) for _ in range(rng.randint(3, 8)))
            if decorate and i % 4 == 0:
                text = f"@user{i}  {text}, https://t.co/x{i} \N{GRINNING FACE}"
            writer.writerow([text, label])
    return path


@pytest.fixture
def synthetic_csv(tmp_path):
    return write_synthetic_csv(tmp_path / "raw.csv")


# -- acceptance summary -------------------------------------------------------

_criteria = {}
_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark:
            _criteria[item.nodeid] = mark.args


def pytest_runtest_logreport(report):
    if report.nodeid not in _criteria:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes.setdefault(report.nodeid, report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (number, title) in sorted(_criteria.items(), key=lambda kv: kv[1][0]):
        outcome = _outcomes.get(nodeid)
        if outcome is None:
            continue
        verdict = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[outcome]
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")
