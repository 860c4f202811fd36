"""Dataset manifests, CSV ingestion and the 60/20/20 split."""
from __future__ import annotations

import csv
import warnings
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, UnknownLabelError
from .preprocess import RawTweet
from .tokenize import LabelSchema

CSV_COLUMNS = ("text", "label")


class CountMismatchWarning(UserWarning):
    pass


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    schema: LabelSchema
    expected_total: int | None = None
    expected_per_class: dict[str, int] = field(default_factory=dict)

    def check_counts(self, labels):
        """Warn (never raise) when observed counts differ from the expected ones."""
        problems = []
        if self.expected_total is not None and len(labels) != self.expected_total:
            problems.append(f"total {len(labels)} vs expected {self.expected_total} "
                            f"(delta {len(labels) - self.expected_total:+d})")
        observed = Counter(labels)
        for cls, want in self.expected_per_class.items():
            got = observed.get(cls, 0)
            if got != want:
                problems.append(f"{cls} {got} vs expected {want} (delta {got - want:+d})")
        if problems:
            warnings.warn(f"{self.name}: " + "; ".join(problems), CountMismatchWarning,
                          stacklevel=2)
        return problems


def _manifest(name, counts, total):
    schema = LabelSchema(name, tuple(counts))
    return DatasetManifest(name, schema, total, dict(counts))


# Class order here is the label schema order used for one-hot columns and reports.
# The Bengali class counts sum to 3418 against a stated total of 3419; both are kept
# as published, so a faithful copy of that corpus triggers a one-row total warning.
BUILTIN_MANIFESTS = {
    "english": _manifest("english", {"none": 10841, "racism": 3017, "sexism": 1919}, 15777),
    "italian": _manifest("italian", {"non-hate": 972, "hate": 2028}, 3000),
    "german": _manifest("german", {"non-hate": 2061, "hate": 970}, 3031),
    "bengali": _manifest("bengali", {"geopolitical": 1379, "personal": 629, "political": 592,
                                     "religious": 502, "abusive": 316}, 3419),
}

# Alternative English figures quoted elsewhere for the same corpus; kept for reference only.
ENGLISH_ALT_COUNTS = {"total": 16000, "none": 10884, "racism": 1924, "sexism": 3082}


def register_builtin_schemas():
    return list(BUILTIN_MANIFESTS.values())


def parse_manifest(text, source="<manifest>") -> DatasetManifest:
    """Parse ``key=value`` lines: ``name``, ``classes`` (comma separated),
    optional ``total`` and ``count.<class>``."""
    entries = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"{source}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()
    try:
        name = entries["name"]
        classes = tuple(c.strip() for c in entries["classes"].split(",") if c.strip())
    except KeyError as exc:
        raise DataError(f"{source}: missing key {exc.args[0]!r}") from None
    schema = LabelSchema(name, classes)
    per_class = {}
    for key, value in entries.items():
        if key.startswith("count."):
            cls = key[len("count."):]
            if cls not in classes:
                raise DataError(f"{source}: count for unknown class {cls!r}")
            per_class[cls] = int(value)
    total = int(entries["total"]) if "total" in entries else None
    return DatasetManifest(name, schema, total, per_class)


def manifest_to_text(manifest: DatasetManifest) -> str:
    lines = [f"name={manifest.name}", "classes=" + ",".join(manifest.schema.classes)]
    if manifest.expected_total is not None:
        lines.append(f"total={manifest.expected_total}")
    lines += [f"count.{k}={v}" for k, v in manifest.expected_per_class.items()]
    return "\n".join(lines) + "\n"


def get_manifest(ref) -> DatasetManifest:
    """Resolve a built-in manifest name or a manifest file path."""
    if ref in BUILTIN_MANIFESTS:
        return BUILTIN_MANIFESTS[ref]
    path = Path(ref)
    if not path.is_file():
        raise DataError(f"unknown manifest {ref!r}: not a built-in name "
                        f"({', '.join(BUILTIN_MANIFESTS)}) or an existing file")
    return parse_manifest(path.read_text(encoding="utf-8"), str(path))


def read_csv_rows(path, required=CSV_COLUMNS):
    """Yield ``(line_number, row_dict)`` for an RFC 4180 CSV with a header."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such file")
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in required if c not in (reader.fieldnames or [])]
        if missing:
            raise DataError(f"{path}: missing column(s) {', '.join(missing)}")
        try:
            for row in reader:
                yield reader.line_num, row
        except csv.Error as exc:
            raise DataError(f"{path}:{reader.line_num}: {exc}") from None


def load_csv(path, manifest: DatasetManifest | None = None, check_counts=True):
    rows = []
    for lineno, rec in read_csv_rows(path):
        label = rec["label"]
        if manifest is not None and label not in manifest.schema.classes:
            err = UnknownLabelError(label, lineno)
            raise DataError(f"{path}: {err}") from err
        rows.append(RawTweet(rec["text"], label))
    if manifest is not None and check_counts:
        manifest.check_counts([r.label for r in rows])
    return rows


def write_csv(rows, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow([r.text, r.label])


@dataclass
class DatasetSplit:
    train: list
    val: list
    test: list
    seed: int
    indices: dict[str, np.ndarray] = field(default_factory=dict)


def split_sizes(n):
    """``(train, val, test)`` with train = round(0.6 n) and val = floor(0.2 n)."""
    n_train = (6 * n + 5) // 10
    n_val = n // 5
    return n_train, n_val, n - n_train - n_val


def split_dataset(rows, seed, stratify=False) -> DatasetSplit:
    """Seeded shuffle, then consecutive 60/20/20 slices.

    With ``stratify`` the shuffled rows are reordered so each class is spread
    evenly along the sequence before slicing; partition sizes are unchanged.
    """
    n = len(rows)
    if n < 5:
        raise DataError(f"need at least 5 rows to split, got {n}")
    order = np.random.default_rng(seed).permutation(n)
    if stratify:
        labels = [rows[i].label for i in order]
        totals = Counter(labels)
        seen = Counter()
        keys = []
        for lab in labels:
            keys.append((seen[lab] + 0.5) / totals[lab])
            seen[lab] += 1
        order = order[np.argsort(np.array(keys), kind="stable")]
    n_train, n_val, _ = split_sizes(n)
    parts = {
        "train": order[:n_train],
        "val": order[n_train: n_train + n_val],
        "test": order[n_train + n_val:],
    }
    return DatasetSplit(
        *([rows[i] for i in parts[k]] for k in ("train", "val", "test")),
        seed=seed, indices=parts,
    )
