"""Seeded synthetic embedding scenarios for desk-scale benchmarks.

Points are drawn on cones around fixed unit directions in a shared space:

* two *main* cones (one per class) separated along a single axis, so one
  linear boundary classifies them;
* four *checker* cones on the diagonals of an orthogonal plane, labeled in
  an XOR pattern: each cone is label-pure, but the two duplicate cones sit
  diametrically opposite, so no linear boundary separates checker
  duplicates from checker non-duplicates while local neighborhoods remain
  perfectly informative.

The source split mixes both components at a fixed rate.  ``label_shift``
blends the *target* class-assignment rule from the linear one (shift 0:
all target mass on the main cones) toward the checker rule (shift 1: all
target mass on the cones a linear scorer cannot rank).  That reproduces,
at desk scale, the regime where a source-trained linear classifier
degrades under labeling-function shift but neighbor voting does not.

All randomness comes from :class:`dqde.rng.PortableRng` in a documented
draw order, so a seed fixes every output byte on every platform.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import DataError
from .rng import PortableRng
from .store import EmbeddingSet


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 271828
    dim: int = 16
    source_duplicates: int = 1000
    source_negatives: int = 1000
    target_duplicates: int = 500
    target_negatives: int = 500
    # e2 offset of the main cones relative to their unit e1 component;
    # 0.577 puts the two class cones ~60 degrees apart
    main_separation: float = 0.577
    # fraction of each source class drawn from its checker cones
    checker_fraction_source: float = 0.4
    # fraction of each target class drawn from its checker cones
    label_shift: float = 0.5
    # per-coordinate gaussian spread around a cone's direction
    noise_scale: float = 0.06
    # per-point magnitude jitter, uniform on [radial_low, radial_high]
    radial_low: float = 0.75
    radial_high: float = 1.5

    def validate(self) -> None:
        counts = (
            self.source_duplicates,
            self.source_negatives,
            self.target_duplicates,
            self.target_negatives,
        )
        if any(c < 1 for c in counts):
            raise DataError(f"counts must be positive, got {counts}")
        if self.dim < 4:
            raise DataError("dim must be at least 4 (two cone planes)")
        if not 0.0 <= self.label_shift <= 1.0:
            raise DataError(f"label_shift must be in [0, 1], got {self.label_shift}")
        if not 0.0 <= self.checker_fraction_source <= 1.0:
            raise DataError("checker_fraction_source must be in [0, 1]")
        if self.main_separation <= 0.0:
            raise DataError("main_separation must be positive")
        if self.noise_scale < 0.0:
            raise DataError("noise_scale must be non-negative")
        if not 0.0 < self.radial_low <= self.radial_high:
            raise DataError("radial range must satisfy 0 < low <= high")

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2) + "\n")

    @classmethod
    def from_json(cls, path: str | Path) -> "SynthConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid synth config {path}: {exc}") from exc
        known = {f for f in cls.__dataclass_fields__}
        extra = set(raw) - known
        if extra:
            raise DataError(f"unknown synth config fields: {sorted(extra)}")
        return cls(**raw)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _cone_directions(config: SynthConfig) -> dict[str, np.ndarray]:
    d = config.dim
    e = np.eye(d)
    sep = config.main_separation
    half = np.sqrt(0.5)
    return {
        "main_dup": _unit(e[0] + sep * e[1]),
        "main_neg": _unit(e[0] - sep * e[1]),
        "checker_dup_a": half * (e[2] + e[3]),
        "checker_dup_b": -half * (e[2] + e[3]),
        "checker_neg_a": half * (e[2] - e[3]),
        "checker_neg_b": half * (e[3] - e[2]),
    }


def _split_counts(total: int, checker_fraction: float) -> tuple[int, int, int]:
    """(main, checker_a, checker_b) counts summing exactly to ``total``."""
    n_checker = round(total * checker_fraction)
    return total - n_checker, n_checker // 2, n_checker - n_checker // 2


def _sample_cone(rng: PortableRng, direction: np.ndarray, n: int, config: SynthConfig) -> np.ndarray:
    dim = config.dim
    noise = config.noise_scale * rng.normals(n * dim).reshape(n, dim)
    radial = config.radial_low + (config.radial_high - config.radial_low) * rng.uniforms(n)
    return radial[:, None] * (direction[None, :] + noise)


def _sample_split(
    rng: PortableRng,
    config: SynthConfig,
    n_dup: int,
    n_neg: int,
    checker_fraction: float,
) -> EmbeddingSet:
    dirs = _cone_directions(config)
    blocks: list[np.ndarray] = []
    labels: list[np.ndarray] = []
    for label, total, cones in (
        (1, n_dup, ("main_dup", "checker_dup_a", "checker_dup_b")),
        (0, n_neg, ("main_neg", "checker_neg_a", "checker_neg_b")),
    ):
        for cone, n in zip(cones, _split_counts(total, checker_fraction)):
            if n == 0:
                continue
            blocks.append(_sample_cone(rng, dirs[cone], n, config))
            labels.append(np.full(n, label, dtype=np.uint8))
    return EmbeddingSet(
        vectors=np.concatenate(blocks).astype(np.float32),
        labels=np.concatenate(labels),
    )


def synth_generate(config: SynthConfig) -> tuple[EmbeddingSet, EmbeddingSet]:
    """Deterministically generate (labeled source, labeled target) sets.

    Draw order is fixed: source duplicates (main, checker a, checker b),
    source negatives likewise, then the target in the same order.
    """
    config.validate()
    rng = PortableRng(config.seed)
    source = _sample_split(
        rng, config, config.source_duplicates, config.source_negatives,
        config.checker_fraction_source,
    )
    target = _sample_split(
        rng, config, config.target_duplicates, config.target_negatives,
        config.label_shift,
    )
    return source, target
