"""ROC construction and normalized partial AUC.

The reported metric is the area under the ROC curve restricted to false
positive rates in [0, cap], divided by cap so a perfect ranker scores 1.0
at any cap.  The evaluation cap used throughout this project is 0.05: the
low-FPR regime is what matters when negatives are incompletely annotated.
Conventions (fixed so numbers are comparable across runs): one ROC point
per distinct score with all tied pairs moving together, trapezoidal
integration, linear interpolation at the cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class ScoredPair:
    """One ranked candidate pair: identifier, score, gold class (1 = duplicate)."""

    id: str
    score: float
    gold: int


@dataclass(frozen=True)
class RocCurve:
    """Piecewise-linear ROC from (0,0) to (1,1); fpr/tpr are parallel arrays."""

    fpr: np.ndarray
    tpr: np.ndarray
    positives: int
    negatives: int


def roc(pairs: list[ScoredPair]) -> RocCurve:
    """Build the ROC curve over descending score thresholds.

    Requires at least one positive and one negative pair; all pairs that
    share a score cross the threshold together.
    """
    if not pairs:
        raise DataError("no scored pairs")
    scores = np.array([p.score for p in pairs], dtype=np.float64)
    gold = np.array([p.gold for p in pairs], dtype=np.int64)
    if not np.isfinite(scores).all():
        raise DataError("scores must be finite")
    if not np.isin(gold, (0, 1)).all():
        raise DataError("gold labels must be 0 or 1")
    positives = int((gold == 1).sum())
    negatives = int((gold == 0).sum())
    if positives == 0:
        raise DataError("no positive pairs")
    if negatives == 0:
        raise DataError("no negative pairs")

    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    g = gold[order]
    # last index of each run of equal scores = one threshold per distinct score
    threshold_idx = np.flatnonzero(np.append(s[1:] != s[:-1], True))
    tp = np.cumsum(g)[threshold_idx]
    fp = (threshold_idx + 1) - tp

    fpr = np.concatenate(([0.0], fp / negatives))
    tpr = np.concatenate(([0.0], tp / positives))
    return RocCurve(fpr=fpr, tpr=tpr, positives=positives, negatives=negatives)


def auc_at(curve: RocCurve, fpr_cap: float = 0.05) -> float:
    """Trapezoidal area under ``curve`` on fpr in [0, cap], divided by cap.

    ``fpr_cap=1.0`` gives the ordinary AUC.  The curve is linearly
    interpolated at the cap when no vertex lands there.
    """
    if not 0.0 < fpr_cap <= 1.0:
        raise ValueError(f"fpr_cap must be in (0, 1], got {fpr_cap}")
    fpr, tpr = curve.fpr, curve.tpr
    inside = fpr <= fpr_cap
    xs = fpr[inside]
    ys = tpr[inside]
    if xs[-1] < fpr_cap:
        # interpolate on the segment crossing the cap
        j = int(np.searchsorted(fpr, fpr_cap, side="left"))
        x0, x1 = fpr[j - 1], fpr[j]
        y0, y1 = tpr[j - 1], tpr[j]
        y_cap = y0 + (y1 - y0) * (fpr_cap - x0) / (x1 - x0)
        xs = np.append(xs, fpr_cap)
        ys = np.append(ys, y_cap)
    area = float(0.5 * np.sum((xs[1:] - xs[:-1]) * (ys[1:] + ys[:-1])))
    return area / fpr_cap


def read_scores_tsv(path: str | Path) -> list[ScoredPair]:
    """Parse a ``target_id <TAB> score <TAB> gold`` file for evaluation.

    Every row must carry a gold label; score files written from an
    unlabeled target cannot be evaluated.
    """
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) == 2:
                raise DataError(
                    f"{path}:{lineno}: no gold label column; score the labeled target split"
                )
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected id<TAB>score<TAB>gold")
            if parts[2] not in ("0", "1"):
                raise DataError(f"{path}:{lineno}: gold label must be 0 or 1, got {parts[2]!r}")
            try:
                score = float(parts[1])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: bad score {parts[1]!r}") from exc
            pairs.append(ScoredPair(id=parts[0], score=score, gold=int(parts[2])))
    return pairs
