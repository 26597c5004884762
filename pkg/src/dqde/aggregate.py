"""Similarity-mass label aggregation: neighbor lists to class scores.

Each retrieved neighbor contributes weight ``w_i = max(1 - d_i, 0)``; the
duplicate score of a query is the fraction of total weight carried by
duplicate-labeled neighbors.  Negative weights (neighbors beyond distance
1, i.e. negative cosine similarity) are clamped to zero so scores stay
true fractions of non-negative mass; a query whose neighbors carry no
mass at all is maximally uninformative and scores 0.5 for both classes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .knn import NeighborList, batch_top_k
from .store import EmbeddingSet


@dataclass(frozen=True)
class ClassScore:
    """Per-query class confidences; the two scores sum to 1."""

    s_duplicate: float
    s_not_duplicate: float
    weight_mass: float  # total clamped weight across neighbors
    clamped_count: int  # neighbors whose weight was negative before clamping


def aggregate(neighbors: NeighborList) -> ClassScore:
    """Turn one neighbor list into duplicate / non-duplicate confidences."""
    if neighbors.k_effective == 0:
        raise ValueError("cannot aggregate an empty neighbor list")
    raw = 1.0 - neighbors.distances
    clamped = int(np.count_nonzero(raw < 0.0))
    w = np.maximum(raw, 0.0)
    mass = float(w.sum())
    if mass == 0.0:
        return ClassScore(0.5, 0.5, 0.0, clamped)
    dup_mass = float(w[neighbors.labels == 1].sum())
    rest_mass = float(w[neighbors.labels == 0].sum())
    return ClassScore(dup_mass / mass, rest_mass / mass, mass, clamped)


def rank_targets(
    store: EmbeddingSet,
    targets: EmbeddingSet,
    k: int,
    threads: int | None = None,
) -> list[tuple[int, float]]:
    """Duplicate score for every target row, in input order.

    Returns (target index, s_duplicate) pairs; sorting/thresholding is the
    metrics layer's concern.
    """
    if targets.count == 0:
        raise ValueError("targets must be non-empty")
    neighbor_lists = batch_top_k(store, targets, k, threads=threads)
    return [(nl.query_index, aggregate(nl).s_duplicate) for nl in neighbor_lists]
