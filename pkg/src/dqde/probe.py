"""Linear probe over frozen pair embeddings.

A single logistic layer trained with full-batch gradient descent on the
labeled source store, then applied to target rows.  Deliberately plain:
fixed epoch count, no stochastic batching, seeded initialization, L2 on
the weights (not the bias), so identical config and data give identical
weights on every run.  This is the trained-classifier counterpart that
neighbor voting is compared against.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError
from .rng import PortableRng
from .store import EmbeddingSet


@dataclass(frozen=True)
class ProbeConfig:
    learning_rate: float = 0.2
    epochs: int = 500
    l2: float = 1e-3
    seed: int = 0


@dataclass(frozen=True)
class ProbeModel:
    weights: np.ndarray  # (dim,) float64
    bias: float
    config: ProbeConfig
    final_loss: float

    @property
    def dim(self) -> int:
        return len(self.weights)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # tanh form is stable for any finite z
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def loss_and_grad(
    w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, l2: float
) -> tuple[float, np.ndarray, float]:
    """L2-regularized mean cross-entropy and its exact gradient."""
    z = X @ w + b
    ce = y * np.logaddexp(0.0, -z) + (1.0 - y) * np.logaddexp(0.0, z)
    loss = float(ce.mean() + 0.5 * l2 * np.dot(w, w))
    residual = _sigmoid(z) - y
    grad_w = X.T @ residual / len(y) + l2 * w
    grad_b = float(residual.mean())
    return loss, grad_w, grad_b


def train_probe(store: EmbeddingSet, config: ProbeConfig = ProbeConfig()) -> ProbeModel:
    """Fit the probe on a labeled store by full-batch gradient descent."""
    if not store.labeled or store.count == 0:
        raise DataError("probe training requires a non-empty labeled store")
    y = store.labels.astype(np.float64)
    if y.min() == y.max():
        raise DataError("probe training requires both classes present")
    X = store.vectors.astype(np.float64)

    w = 0.01 * PortableRng(config.seed).normals(store.dim)
    b = 0.0
    loss = np.inf
    for _ in range(config.epochs):
        loss, grad_w, grad_b = loss_and_grad(w, b, X, y, config.l2)
        if not np.isfinite(loss):
            raise DataError(
                f"training diverged (non-finite loss); lower learning_rate={config.learning_rate}"
            )
        w = w - config.learning_rate * grad_w
        b = b - config.learning_rate * grad_b
    final_loss, _, _ = loss_and_grad(w, b, X, y, config.l2)
    if not np.isfinite(final_loss):
        raise DataError("training diverged (non-finite loss)")
    return ProbeModel(weights=w, bias=b, config=config, final_loss=float(final_loss))


def probe_score(model: ProbeModel, targets: EmbeddingSet) -> list[tuple[int, float]]:
    """Duplicate probability for every target row, in input order."""
    if targets.dim != model.dim:
        raise DataError(f"dimension mismatch: targets {targets.dim} vs model {model.dim}")
    p = _sigmoid(targets.vectors.astype(np.float64) @ model.weights + model.bias)
    return list(enumerate(p.tolist()))


def save_model(model: ProbeModel, path: str | Path) -> None:
    """Serialize as key<TAB>value lines; floats are repr'd for exact round-trip."""
    lines = [
        f"dim\t{model.dim}",
        "weights\t" + "\t".join(repr(v) for v in model.weights.tolist()),
        f"bias\t{model.bias!r}",
        f"learning_rate\t{model.config.learning_rate!r}",
        f"epochs\t{model.config.epochs}",
        f"l2\t{model.config.l2!r}",
        f"seed\t{model.config.seed}",
        f"final_loss\t{model.final_loss!r}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def load_model(path: str | Path) -> ProbeModel:
    fields: dict[str, list[str]] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        parts = line.split("\t")
        if len(parts) < 2:
            raise DataError(f"{path}:{lineno}: expected key<TAB>value")
        fields[parts[0]] = parts[1:]
    try:
        dim = int(fields["dim"][0])
        weights = np.array([float(v) for v in fields["weights"]], dtype=np.float64)
        config = ProbeConfig(
            learning_rate=float(fields["learning_rate"][0]),
            epochs=int(fields["epochs"][0]),
            l2=float(fields["l2"][0]),
            seed=int(fields["seed"][0]),
        )
        model = ProbeModel(
            weights=weights,
            bias=float(fields["bias"][0]),
            config=config,
            final_loss=float(fields["final_loss"][0]),
        )
    except (KeyError, ValueError) as exc:
        raise DataError(f"invalid probe model file {path}: {exc}") from exc
    if model.dim != dim:
        raise DataError(f"{path}: dim field {dim} does not match {model.dim} weights")
    if not np.isfinite(model.weights).all() or not np.isfinite(model.bias):
        raise DataError(f"{path}: non-finite model parameters")
    return model
