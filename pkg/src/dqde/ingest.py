"""Parsing of released question corpora into the normalized TSV layout.

Everything downstream speaks two plain formats, both UTF-8, no header:

* corpus TSV: ``id <TAB> title <TAB> body`` (body may be empty)
* pair TSV:   ``id1 <TAB> id2 <TAB> label`` with label 1=duplicate, 0=not

Raw dataset quirks (gzip, whitespace-separated pair files, tabs inside
question bodies) are confined to this module: text fields are normalized
by collapsing any internal whitespace run to a single space so the TSVs
stay one-record-per-line.  Ingest is idempotent on its own output.
"""

from __future__ import annotations

import gzip
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

from .errors import DataError

_WS = re.compile(r"\s+")


def _normalize_field(text: str) -> str:
    return _WS.sub(" ", text).strip()


def _open_text(path: str | Path) -> TextIO:
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rt", encoding="utf-8", errors="replace")
    return open(path, "rt", encoding="utf-8", errors="replace")


@dataclass(frozen=True)
class IngestReport:
    domain: str
    questions: int
    positives: int
    negatives: int
    duplicate_pairs_removed: int
    negative_positive_ratio: float  # negatives per positive; inf when no positives

    def lines(self) -> list[str]:
        ratio = "inf" if math.isinf(self.negative_positive_ratio) else (
            f"{self.negative_positive_ratio:.6f}"
        )
        return [
            f"domain\t{self.domain}",
            f"questions\t{self.questions}",
            f"positives\t{self.positives}",
            f"negatives\t{self.negatives}",
            f"duplicate_pairs_removed\t{self.duplicate_pairs_removed}",
            f"negative_positive_ratio\t{ratio}",
        ]


def read_corpus_file(path: str | Path) -> list[tuple[str, str, str]]:
    """Read a raw or normalized corpus file into (id, title, body) rows.

    Accepts ``id <TAB> title`` or ``id <TAB> title <TAB> body``; any extra
    tab-separated fields are folded into the body (bodies in the wild may
    contain literal tabs).
    """
    rows = []
    seen: set[str] = set()
    with _open_text(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise DataError(f"{path}:{lineno}: expected id<TAB>title[<TAB>body]")
            qid = parts[0].strip()
            if not qid:
                raise DataError(f"{path}:{lineno}: empty question id")
            if qid in seen:
                raise DataError(f"{path}:{lineno}: duplicate question id {qid!r}")
            seen.add(qid)
            title = _normalize_field(parts[1])
            body = _normalize_field(" ".join(parts[2:])) if len(parts) > 2 else ""
            rows.append((qid, title, body))
    return rows


def read_pair_file(path: str | Path) -> list[tuple[str, str, int]]:
    """Read a raw pair file: two whitespace-separated ids per line."""
    pairs = []
    with _open_text(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            tokens = line.split()
            if not tokens:
                continue
            if len(tokens) < 2:
                raise DataError(f"{path}:{lineno}: expected two question ids")
            pairs.append((tokens[0], tokens[1], lineno))
    return pairs


def read_pairs_tsv(path: str | Path) -> list[tuple[str, str, int]]:
    """Read a normalized pair TSV into (id1, id2, label) triples."""
    pairs = []
    with _open_text(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected id1<TAB>id2<TAB>label")
            if parts[2] not in ("0", "1"):
                raise DataError(f"{path}:{lineno}: label must be 0 or 1, got {parts[2]!r}")
            pairs.append((parts[0].strip(), parts[1].strip(), int(parts[2])))
    return pairs


def write_corpus_tsv(rows: Iterable[tuple[str, str, str]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for qid, title, body in rows:
            fh.write(f"{qid}\t{_normalize_field(title)}\t{_normalize_field(body)}\n")


def write_pairs_tsv(pairs: Iterable[tuple[str, str, int]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for id1, id2, label in pairs:
            fh.write(f"{id1}\t{id2}\t{label}\n")


def ingest_domain(
    corpus_path: str | Path,
    pos_path: str | Path,
    neg_path: str | Path,
    out_dir: str | Path,
    domain: str = "domain",
) -> IngestReport:
    """Normalize one domain into ``<out_dir>/corpus.tsv`` and ``pairs.tsv``.

    Every pair id must resolve in the corpus; self-pairs are rejected;
    repeated (unordered) pairs within a class are dropped and counted.
    An empty pair file is a degenerate but legal input.
    """
    corpus = read_corpus_file(corpus_path)
    ids = {qid for qid, _, _ in corpus}

    pairs: list[tuple[str, str, int]] = []
    seen_pairs: set[tuple[str, str, int]] = set()
    removed = 0
    for path, label in ((pos_path, 1), (neg_path, 0)):
        for id1, id2, lineno in read_pair_file(path):
            if id1 == id2:
                raise DataError(f"{path}:{lineno}: pair of a question with itself ({id1!r})")
            for qid in (id1, id2):
                if qid not in ids:
                    raise DataError(f"{path}:{lineno}: unresolvable question id {qid!r}")
            key = (min(id1, id2), max(id1, id2), label)
            if key in seen_pairs:
                removed += 1
                continue
            seen_pairs.add(key)
            pairs.append((id1, id2, label))

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_corpus_tsv(corpus, out_dir / "corpus.tsv")
    write_pairs_tsv(pairs, out_dir / "pairs.tsv")

    positives = sum(1 for _, _, label in pairs if label == 1)
    negatives = len(pairs) - positives
    ratio = negatives / positives if positives else math.inf
    return IngestReport(
        domain=domain,
        questions=len(corpus),
        positives=positives,
        negatives=negatives,
        duplicate_pairs_removed=removed,
        negative_positive_ratio=ratio,
    )
