"""Embedding set validation and .dqde container round-trips."""

import io
import struct

import numpy as np
import pytest

from dqde.errors import StoreFormatError
from dqde.store import HEADER_SIZE, EmbeddingSet, read_store, write_store


def random_set(rng, count, dim, labeled=True):
    vectors = rng.normal(size=(count, dim)).astype(np.float32)
    labels = rng.integers(0, 2, size=count).astype(np.uint8) if labeled else None
    return EmbeddingSet(vectors=vectors, labels=labels)


class TestFormatArithmetic:
    def test_empty_set_is_header_only(self):
        emb = EmbeddingSet(vectors=np.zeros((0, 8), dtype=np.float32))
        buf = io.BytesIO()
        assert write_store(emb, buf) == 20
        assert len(buf.getvalue()) == 20

    def test_two_by_three_labeled_is_46_bytes(self):
        emb = EmbeddingSet(
            vectors=np.arange(6, dtype=np.float32).reshape(2, 3) + 1.0,
            labels=np.array([1, 0], dtype=np.uint8),
        )
        buf = io.BytesIO()
        assert write_store(emb, buf) == 46  # 20 + 4*2*3 + 2
        back = read_store(io.BytesIO(buf.getvalue()))
        assert back.count == 2 and back.dim == 3 and back.labeled


class TestRoundTrip:
    def test_random_sets_bit_exact(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            count = int(rng.integers(0, 40))
            dim = int(rng.integers(1, 24))
            emb = random_set(rng, count, dim, labeled=bool(rng.integers(0, 2)))
            buf = io.BytesIO()
            n = write_store(emb, buf)
            raw = buf.getvalue()
            assert n == len(raw) == emb.byte_size()
            back = read_store(io.BytesIO(raw))
            assert back.vectors.tobytes() == emb.vectors.tobytes()
            if emb.labeled:
                assert np.array_equal(back.labels, emb.labels)
            else:
                assert back.labels is None
            # writing the read-back set reproduces the same bytes
            buf2 = io.BytesIO()
            write_store(back, buf2)
            assert buf2.getvalue() == raw

    def test_path_round_trip(self, tmp_path):
        rng = np.random.default_rng(7)
        emb = random_set(rng, 1000, 16)
        path = tmp_path / "big.dqde"
        write_store(emb, path)
        back = read_store(path)
        assert back.vectors.tobytes() == emb.vectors.tobytes()

    def test_cached_norms_match_recomputation(self):
        rng = np.random.default_rng(3)
        emb = random_set(rng, 200, 12)
        expected = np.sqrt((emb.vectors.astype(np.float64) ** 2).sum(axis=1))
        np.testing.assert_allclose(emb.norms, expected, rtol=1e-6)


class TestValidation:
    def test_zero_norm_row_rejected_with_index(self):
        vectors = np.ones((4, 3), dtype=np.float32)
        vectors[2] = 0.0
        with pytest.raises(StoreFormatError, match="row 2"):
            EmbeddingSet(vectors=vectors)

    def test_non_finite_rejected_with_position(self):
        vectors = np.ones((3, 4), dtype=np.float32)
        vectors[1, 3] = np.nan
        with pytest.raises(StoreFormatError, match="row 1, col 3"):
            EmbeddingSet(vectors=vectors)

    def test_label_length_mismatch(self):
        with pytest.raises(StoreFormatError, match="labels"):
            EmbeddingSet(
                vectors=np.ones((3, 2), dtype=np.float32),
                labels=np.array([1, 0], dtype=np.uint8),
            )

    def test_label_values_must_be_binary(self):
        with pytest.raises(StoreFormatError, match="row 1"):
            EmbeddingSet(
                vectors=np.ones((2, 2), dtype=np.float32),
                labels=np.array([0, 7], dtype=np.uint8),
            )

    def test_vectors_immutable(self):
        emb = EmbeddingSet(vectors=np.ones((2, 2), dtype=np.float32))
        with pytest.raises(ValueError):
            emb.vectors[0, 0] = 5.0


class TestReadErrors:
    def _valid_bytes(self):
        emb = EmbeddingSet(
            vectors=np.ones((2, 3), dtype=np.float32),
            labels=np.array([1, 0], dtype=np.uint8),
        )
        buf = io.BytesIO()
        write_store(emb, buf)
        return bytearray(buf.getvalue())

    def test_bad_magic(self):
        raw = self._valid_bytes()
        raw[:4] = b"XXXX"
        with pytest.raises(StoreFormatError, match="magic"):
            read_store(io.BytesIO(bytes(raw)))

    def test_unsupported_version(self):
        raw = self._valid_bytes()
        raw[4:6] = struct.pack("<H", 9)
        with pytest.raises(StoreFormatError, match="version 9"):
            read_store(io.BytesIO(bytes(raw)))

    def test_unknown_flags(self):
        raw = self._valid_bytes()
        raw[6:8] = struct.pack("<H", 0x0003)
        with pytest.raises(StoreFormatError, match="flag"):
            read_store(io.BytesIO(bytes(raw)))

    def test_truncated_payload_reports_lengths(self):
        raw = bytes(self._valid_bytes())[:30]
        with pytest.raises(StoreFormatError, match="expected 46 bytes, got 30"):
            read_store(io.BytesIO(raw))

    def test_trailing_garbage_rejected(self):
        raw = bytes(self._valid_bytes()) + b"\x00"
        with pytest.raises(StoreFormatError, match="expected 46 bytes, got 47"):
            read_store(io.BytesIO(raw))

    def test_short_header(self):
        with pytest.raises(StoreFormatError, match="header"):
            read_store(io.BytesIO(b"DQDE"))
        assert HEADER_SIZE == 20

    def test_zero_norm_row_in_file(self):
        raw = self._valid_bytes()
        # zero out the second row's floats
        offset = HEADER_SIZE + 4 * 3
        raw[offset : offset + 12] = b"\x00" * 12
        with pytest.raises(StoreFormatError, match="row 1 has zero norm"):
            read_store(io.BytesIO(bytes(raw)))
