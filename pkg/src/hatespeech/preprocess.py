"""Tweet cleaning.

Two cleaners are provided. ``clean_basic`` deletes user mentions and URLs,
``clean_rich`` replaces them with the placeholder words ``username`` and
``url`` and spells out emoji as their short names. Both collapse whitespace.
"""
from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field

from sklearn.base import BaseEstimator, TransformerMixin

MENTION_RE = re.compile(r"@\S+")
URL_RE = re.compile(r"(?:https?://|www\.)\S*", re.IGNORECASE)
WHITESPACE_RE = re.compile(r"\s+")

CLEAN_MODES = ("basic", "rich")

# Codepoint blocks whose assigned characters are treated as emoji.
_EMOJI_BLOCKS = (
    (0x1F1E6, 0x1F1FF),  # regional indicators
    (0x1F300, 0x1F5FF),
    (0x1F600, 0x1F64F),
    (0x1F680, 0x1F6FF),
    (0x1F900, 0x1F9FF),
    (0x1FA70, 0x1FAFF),
    (0x2600, 0x26FF),
    (0x2700, 0x27BF),
    (0x231A, 0x231B),
    (0x23E9, 0x23F3),
    (0x23F8, 0x23FA),
    (0x2B1B, 0x2B1C),
    (0x2B50, 0x2B50),
    (0x2B55, 0x2B55),
)
# Joiners and presentation selectors carry no meaning once emoji are spelled out.
_EMOJI_GLUE = {"\u200d": " ", "\ufe0e": "", "\ufe0f": ""}


def _short_name(ch):
    return re.sub(r"[^a-z0-9]+", "_", unicodedata.name(ch).lower()).strip("_")


def _build_emoji_table():
    table = {}
    for lo, hi in _EMOJI_BLOCKS:
        for cp in range(lo, hi + 1):
            ch = chr(cp)
            try:
                table[ch] = _short_name(ch)
            except ValueError:  # unassigned codepoint
                continue
    return table


EMOJI_NAMES: dict[str, str] = _build_emoji_table()
_EMOJI_TRANSLATION = str.maketrans(
    {**{ch: f" {name} " for ch, name in EMOJI_NAMES.items()}, **_EMOJI_GLUE}
)


def _squash(text):
    return WHITESPACE_RE.sub(" ", text).strip()


def clean_basic(raw: str) -> str:
    """Delete mentions and URLs, then collapse whitespace."""
    text = MENTION_RE.sub(" ", raw)
    text = URL_RE.sub(" ", text)
    return _squash(text)


def clean_rich(raw: str) -> str:
    """Replace mentions with ``username``, URLs with ``url`` and emoji with names.

    >>> clean_rich("@john check https://t.co/x \\N{GRINNING FACE}")
    'username check url grinning_face'
    """
    text = MENTION_RE.sub(" username ", raw)
    text = URL_RE.sub(" url ", text)
    text = text.translate(_EMOJI_TRANSLATION)
    return _squash(text)


_CLEANERS = {"basic": clean_basic, "rich": clean_rich}


def get_cleaner(mode):
    try:
        return _CLEANERS[mode]
    except KeyError:
        raise ValueError(f"clean mode must be one of {CLEAN_MODES}, got {mode!r}") from None


@dataclass(frozen=True)
class RawTweet:
    text: str
    label: str


@dataclass(frozen=True)
class CleanTweet:
    text: str
    label: str


@dataclass
class CleaningSummary:
    mode: str
    rows: int = 0
    emptied: list[int] = field(default_factory=list)

    @property
    def n_emptied(self):
        return len(self.emptied)

    def __str__(self):
        return f"mode={self.mode} rows={self.rows} emptied={self.n_emptied}"


def clean_dataset(rows, mode="basic"):
    """Clean every row with the selected cleaner.

    Returns ``(cleaned, summary)``. Rows that end up empty are kept and their
    positions recorded in ``summary.emptied``.
    """
    if not rows:
        raise ValueError("no rows to clean")
    cleaner = get_cleaner(mode)
    summary = CleaningSummary(mode=mode)
    cleaned = []
    for i, row in enumerate(rows):
        text = cleaner(row.text)
        if not text:
            summary.emptied.append(i)
        cleaned.append(CleanTweet(text, row.label))
    summary.rows = len(cleaned)
    return cleaned, summary


class TextCleaner(TransformerMixin, BaseEstimator):
    """Stateless transformer wrapping :func:`clean_basic` / :func:`clean_rich`."""

    def __init__(self, mode="basic"):
        self.mode = mode

    def fit(self, X, y=None):
        get_cleaner(self.mode)
        return self

    def transform(self, X):
        cleaner = get_cleaner(self.mode)
        return [cleaner(text) for text in X]

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.input_tags.string = True
        tags.input_tags.two_d_array = False
        tags.requires_fit = False
        return tags
