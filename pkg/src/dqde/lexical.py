"""Token-set Jaccard statistics for diagnosing domain shift.

Two views of lexical overlap: mean Jaccard between the two questions of a
pair, grouped by class (duplicates overlap far more than non-duplicates,
and by very different margins across forums), and Jaccard between whole
corpus vocabularies (how far apart two domains sit lexically).

Tokenization is deliberately plain: lowercase, split on any run of
non-alphanumeric characters, deduplicate.  No stemming, no stopwords.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

# unicode letters and digits; underscore excluded
_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> set[str]:
    """Lowercased alphanumeric-run token set of ``text``."""
    return set(_TOKEN.findall(text.lower()))


def jaccard(a: set[str], b: set[str]) -> float:
    """|a n b| / |a u b|, with 0.0 when both sets are empty."""
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


@dataclass(frozen=True)
class TokenizedCorpus:
    """Per-question token sets plus the corpus vocabulary (their union)."""

    token_sets: dict[str, set[str]]
    vocabulary: set[str]

    @property
    def question_count(self) -> int:
        return len(self.token_sets)

    @classmethod
    def build(
        cls, rows: Iterable[tuple[str, str, str]], title_only: bool = False
    ) -> "TokenizedCorpus":
        """Tokenize (id, title, body) rows; question text is title + body
        unless ``title_only`` (corpora without bodies just leave body empty).
        """
        token_sets: dict[str, set[str]] = {}
        vocabulary: set[str] = set()
        for qid, title, body in rows:
            text = title if title_only else f"{title} {body}"
            toks = tokenize(text)
            token_sets[qid] = toks
            vocabulary |= toks
        return cls(token_sets=token_sets, vocabulary=vocabulary)


def class_mean_jaccard(
    pairs: Iterable[tuple[str, str, int]],
) -> tuple[float | None, float | None]:
    """Mean pair Jaccard per class over (text1, text2, label) triples.

    Returns (duplicate mean, non-duplicate mean); a class with no pairs
    yields None rather than 0.
    """
    sums = [0.0, 0.0]
    counts = [0, 0]
    for text1, text2, label in pairs:
        if label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {label!r}")
        sums[label] += jaccard(tokenize(text1), tokenize(text2))
        counts[label] += 1
    dup_mean = sums[1] / counts[1] if counts[1] else None
    nondup_mean = sums[0] / counts[0] if counts[0] else None
    return dup_mean, nondup_mean


def vocab_jaccard(a: TokenizedCorpus, b: TokenizedCorpus) -> float:
    """Jaccard overlap of two corpus vocabularies."""
    if a.question_count == 0 or b.question_count == 0:
        raise ValueError("vocab_jaccard requires non-empty corpora")
    return jaccard(a.vocabulary, b.vocabulary)
