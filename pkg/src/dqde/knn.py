"""Exact cosine-distance top-k retrieval over an embedding store.

The scan is a flat one: store rows are normalized once, queries are
normalized on entry, and each candidate distance is one dot product
accumulated in float64 regardless of the float32 storage.  Results are
exact and deterministic: neighbors are ordered by ascending distance with
ties broken by ascending source index, independent of chunking or thread
count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .store import EmbeddingSet

THREADS_ENV = "DQDE_THREADS"

# Queries are scanned in fixed-size chunks so the arithmetic (and therefore
# the result) is identical whether chunks run sequentially or in parallel.
_CHUNK = 256


@dataclass(frozen=True)
class NeighborList:
    """The k nearest store rows for one query, nearest first."""

    query_index: int
    indices: np.ndarray  # (k_effective,) int64 source row indices
    distances: np.ndarray  # (k_effective,) float64 cosine distances in [0, 2]
    labels: np.ndarray  # (k_effective,) uint8

    @property
    def k_effective(self) -> int:
        return len(self.indices)

    @property
    def entries(self) -> list[tuple[int, float, int]]:
        """(source index, distance, label) triples, a convenience view."""
        return [
            (int(i), float(d), int(l))
            for i, d, l in zip(self.indices, self.distances, self.labels)
        ]


def cosine_distance(u: np.ndarray, v: np.ndarray) -> float:
    """1 - cos(u, v), clamped into [0, 2] against rounding."""
    u = np.asarray(u, dtype=np.float64).reshape(-1)
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine distance undefined for zero-norm vector")
    d = 1.0 - float(np.dot(u, v)) / (nu * nv)
    return min(max(d, 0.0), 2.0)


def _unit_rows(emb: EmbeddingSet) -> np.ndarray:
    return emb.vectors.astype(np.float64) / emb.norms[:, None]


def _check_store(store: EmbeddingSet) -> None:
    if not store.labeled:
        raise ValueError("store must be labeled")
    if store.count == 0:
        raise ValueError("store must be non-empty")


def _top_rows(dist_row: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k smallest distances, ties resolved by ascending index."""
    n = dist_row.shape[0]
    if k >= n:
        return np.argsort(dist_row, kind="stable")
    # argpartition alone may split exact ties arbitrarily at the boundary;
    # gather every candidate at or below the k-th distance, then cut.
    kth = np.partition(dist_row, k - 1)[k - 1]
    cand = np.flatnonzero(dist_row <= kth)
    order = cand[np.argsort(dist_row[cand], kind="stable")]
    return order[:k]


def _scan_chunk(
    store_unit: np.ndarray,
    labels: np.ndarray,
    queries_unit: np.ndarray,
    first_query: int,
    k: int,
) -> list[NeighborList]:
    sims = queries_unit @ store_unit.T
    dists = np.clip(1.0 - sims, 0.0, 2.0)
    out = []
    for row_offset, row in enumerate(dists):
        top = _top_rows(row, k)
        out.append(
            NeighborList(
                query_index=first_query + row_offset,
                indices=top.astype(np.int64),
                distances=row[top],
                labels=labels[top],
            )
        )
    return out


def top_k(store: EmbeddingSet, query: np.ndarray, k: int) -> NeighborList:
    """Exact k nearest store rows to ``query`` under cosine distance.

    ``k_effective = min(k, store.count)``; ordering is by ascending
    distance, then ascending source index.
    """
    _check_store(store)
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    q = np.asarray(query, dtype=np.float64).reshape(-1)
    if q.shape[0] != store.dim:
        raise ValueError(f"dimension mismatch: query {q.shape[0]} vs store {store.dim}")
    if not np.isfinite(q).all():
        raise ValueError("query has non-finite components")
    nq = np.linalg.norm(q)
    if nq == 0.0:
        raise ValueError("zero-norm query")
    k_eff = min(k, store.count)
    (result,) = _scan_chunk(_unit_rows(store), store.labels, (q / nq)[None, :], 0, k_eff)
    return result


def batch_top_k(
    store: EmbeddingSet,
    queries: EmbeddingSet,
    k: int,
    threads: int | None = None,
) -> list[NeighborList]:
    """``top_k`` for every row of ``queries``, in query order.

    ``threads`` (default: the DQDE_THREADS environment variable, else 1)
    only changes how many fixed-size query chunks run concurrently; output
    is identical for any value.
    """
    _check_store(store)
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if queries.dim != store.dim:
        raise ValueError(f"dimension mismatch: queries {queries.dim} vs store {store.dim}")
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1") or "1")
    threads = max(1, threads)

    store_unit = _unit_rows(store)
    queries_unit = _unit_rows(queries)
    k_eff = min(k, store.count)
    starts = range(0, queries.count, _CHUNK)

    def scan(start: int) -> list[NeighborList]:
        return _scan_chunk(
            store_unit, store.labels, queries_unit[start : start + _CHUNK], start, k_eff
        )

    if threads == 1 or queries.count <= _CHUNK:
        chunks = [scan(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(scan, starts))
    return [nl for chunk in chunks for nl in chunk]
