"""Duplicate-question ranking by exact k-NN over pair embeddings.

The pipeline: embed question pairs elsewhere (or with the bundled
synthetic generator), store them in ``.dqde`` files, retrieve each target
pair's nearest labeled source pairs by cosine distance, aggregate the
neighbors' labels weighted by similarity mass into a duplicate score, and
evaluate rankings with normalized partial AUC.  A linear probe trained on
the same frozen embeddings serves as the classification counterpart, and
Jaccard token statistics quantify how far apart two domains sit lexically.
"""

__version__ = "0.1.0"

from .aggregate import ClassScore, aggregate, rank_targets
from .errors import DataError, StoreFormatError
from .ingest import IngestReport, ingest_domain
from .knn import NeighborList, batch_top_k, cosine_distance, top_k
from .lexical import TokenizedCorpus, class_mean_jaccard, jaccard, tokenize, vocab_jaccard
from .metrics import RocCurve, ScoredPair, auc_at, roc
from .probe import ProbeConfig, ProbeModel, probe_score, train_probe
from .store import EmbeddingSet, read_store, write_store
from .synth import SynthConfig, synth_generate

__all__ = [
    "ClassScore",
    "DataError",
    "EmbeddingSet",
    "IngestReport",
    "NeighborList",
    "ProbeConfig",
    "ProbeModel",
    "RocCurve",
    "ScoredPair",
    "StoreFormatError",
    "SynthConfig",
    "TokenizedCorpus",
    "aggregate",
    "auc_at",
    "batch_top_k",
    "class_mean_jaccard",
    "cosine_distance",
    "ingest_domain",
    "jaccard",
    "probe_score",
    "rank_targets",
    "read_store",
    "roc",
    "synth_generate",
    "tokenize",
    "top_k",
    "train_probe",
    "vocab_jaccard",
    "write_store",
]
