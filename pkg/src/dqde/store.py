"""Embedding sets and the ``.dqde`` binary container.

A ``.dqde`` file holds a dense float32 matrix of pair embeddings plus an
optional byte-per-row label block:

    offset  size          field
    0       4             magic, ASCII "DQDE"
    4       2             version (uint16 LE), currently 1
    6       2             flags (uint16 LE), bit 0 = labels present
    8       4             dim (uint32 LE)
    12      8             count (uint64 LE)
    20      4*count*dim   row-major float32 LE payload
    ...     count         labels, one byte per row (only when flagged)

Everything is little-endian. Round-tripping a set through write/read
reproduces vectors bit-for-bit and labels exactly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Union

import numpy as np

from .errors import StoreFormatError

MAGIC = b"DQDE"
VERSION = 1
FLAG_LABELS = 0x0001

_HEADER = struct.Struct("<4sHHIQ")
HEADER_SIZE = _HEADER.size  # 20 bytes

PathOrIO = Union[str, Path, BinaryIO]


@dataclass(frozen=True)
class EmbeddingSet:
    """Immutable matrix of pair embeddings with optional binary labels.

    ``vectors`` is a (count, dim) float32 array whose rows are all finite
    and have strictly positive Euclidean norm.  ``labels``, when present,
    is a (count,) uint8 array with values in {0, 1} (1 = duplicate).
    ``norms`` caches per-row Euclidean norms in float64; it is derived at
    construction and never serialized.
    """

    vectors: np.ndarray
    labels: np.ndarray | None = None
    norms: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        vec = np.ascontiguousarray(self.vectors, dtype=np.float32)
        if vec.ndim != 2:
            raise StoreFormatError(f"vectors must be 2-D, got shape {vec.shape}")
        if vec.shape[1] < 1:
            raise StoreFormatError("dim must be a positive integer")
        bad = ~np.isfinite(vec)
        if bad.any():
            row, col = np.argwhere(bad)[0]
            raise StoreFormatError(f"non-finite value at row {row}, col {col}")
        norms = np.linalg.norm(vec.astype(np.float64), axis=1)
        if vec.shape[0] and not (norms > 0.0).all():
            row = int(np.flatnonzero(norms == 0.0)[0])
            raise StoreFormatError(f"row {row} has zero norm")

        labels = self.labels
        if labels is not None:
            labels = np.ascontiguousarray(labels, dtype=np.uint8)
            if labels.shape != (vec.shape[0],):
                raise StoreFormatError(
                    f"labels length {labels.shape} does not match count {vec.shape[0]}"
                )
            if labels.size and not np.isin(labels, (0, 1)).all():
                bad_row = int(np.flatnonzero(~np.isin(labels, (0, 1)))[0])
                raise StoreFormatError(f"label at row {bad_row} is not 0 or 1")
            labels.setflags(write=False)

        vec.setflags(write=False)
        norms.setflags(write=False)
        object.__setattr__(self, "vectors", vec)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "norms", norms)

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def labeled(self) -> bool:
        return self.labels is not None

    def byte_size(self) -> int:
        """Size of this set's on-disk representation."""
        return HEADER_SIZE + 4 * self.count * self.dim + (self.count if self.labeled else 0)


def write_store(emb: EmbeddingSet, destination: PathOrIO) -> int:
    """Write ``emb`` to ``destination`` (path or binary file object).

    Returns the total number of bytes written.
    """
    flags = FLAG_LABELS if emb.labeled else 0
    header = _HEADER.pack(MAGIC, VERSION, flags, emb.dim, emb.count)
    payload = np.ascontiguousarray(emb.vectors, dtype="<f4").tobytes()
    blob = header + payload
    if emb.labeled:
        blob += emb.labels.tobytes()

    if isinstance(destination, (str, Path)):
        with open(destination, "wb") as fh:
            fh.write(blob)
    else:
        destination.write(blob)
    return len(blob)


def read_store(source: PathOrIO) -> EmbeddingSet:
    """Read and validate a ``.dqde`` file into an :class:`EmbeddingSet`."""
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            raw = fh.read()
    else:
        raw = source.read()

    if len(raw) < HEADER_SIZE:
        raise StoreFormatError(
            f"file too short for header: expected at least {HEADER_SIZE} bytes, got {len(raw)}"
        )
    magic, version, flags, dim, count = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise StoreFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise StoreFormatError(f"unsupported version {version}, expected {VERSION}")
    if flags & ~FLAG_LABELS:
        raise StoreFormatError(f"unknown flag bits 0x{flags & ~FLAG_LABELS:04x}")
    if dim < 1:
        raise StoreFormatError("dim must be a positive integer")

    labeled = bool(flags & FLAG_LABELS)
    expected = HEADER_SIZE + 4 * count * dim + (count if labeled else 0)
    if len(raw) != expected:
        kind = "truncated" if len(raw) < expected else "oversized"
        raise StoreFormatError(f"{kind} payload: expected {expected} bytes, got {len(raw)}")

    vectors = np.frombuffer(
        raw, dtype="<f4", count=count * dim, offset=HEADER_SIZE
    ).reshape(count, dim)
    labels = None
    if labeled:
        labels = np.frombuffer(raw, dtype=np.uint8, count=count, offset=HEADER_SIZE + 4 * count * dim)
    return EmbeddingSet(vectors=vectors, labels=labels)
