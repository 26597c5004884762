"""Single executable wiring the pipeline together.

Subcommands compose through files: ``ingest`` and ``synth`` produce the
normalized TSVs and ``.dqde`` stores, ``knn-score`` / ``probe-*`` turn
stores into score TSVs, ``eval`` and ``lexstats`` turn those into metric
reports.  Exit codes: 0 success, 1 usage error, 2 data error.  Every
file-producing run also writes a ``*.manifest.json`` recording the
resolved options, SHA-256 digests of its inputs, tool version and
duration, so permutation-heavy experiments stay attributable.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .aggregate import rank_targets
from .errors import DataError
from .ingest import (
    ingest_domain,
    read_corpus_file,
    read_pairs_tsv,
)
from .lexical import TokenizedCorpus, class_mean_jaccard, vocab_jaccard
from .metrics import auc_at, read_scores_tsv, roc
from .probe import ProbeConfig, load_model, probe_score, save_model, train_probe
from .store import read_store, write_store
from .synth import SynthConfig, synth_generate


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # noqa: D102 - argparse hook
        raise _UsageError(message)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _write_manifest(
    manifest_path: Path,
    subcommand: str,
    args: argparse.Namespace,
    inputs: list[Path],
    started: float,
) -> None:
    options = {
        k: (str(v) if isinstance(v, Path) else v)
        for k, v in vars(args).items()
        if k != "func"
    }
    manifest = {
        "tool": "dqde",
        "version": __version__,
        "subcommand": subcommand,
        "options": options,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "duration_seconds": round(time.perf_counter() - started, 6),
    }
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def write_scores_tsv(
    scores: list[tuple[int, float]], gold: np.ndarray | None, path: str | Path
) -> None:
    """``target_id <TAB> score [<TAB> gold]`` rows; scores repr'd exactly."""
    with open(path, "w", encoding="utf-8") as fh:
        for idx, score in scores:
            if gold is None:
                fh.write(f"{idx}\t{score!r}\n")
            else:
                fh.write(f"{idx}\t{score!r}\t{int(gold[idx])}\n")


def _emit(lines: list[str], out: Path | None) -> None:
    for line in lines:
        print(line)
    if out is not None:
        out.write_text("\n".join(lines) + "\n")


# --- subcommands -----------------------------------------------------------


def _cmd_inspect(args: argparse.Namespace) -> int:
    emb = read_store(args.file)
    lines = [
        f"count\t{emb.count}",
        f"dim\t{emb.dim}",
        f"labeled\t{'yes' if emb.labeled else 'no'}",
    ]
    if emb.labeled:
        lines.append(f"positives\t{int((emb.labels == 1).sum())}")
        lines.append(f"negatives\t{int((emb.labels == 0).sum())}")
    lines.append(f"bytes\t{emb.byte_size()}")
    _emit(lines, None)
    return 0


_CORPUS_CANDIDATES = ("corpus.tsv", "corpus.txt", "corpus", "text.tsv", "questions.tsv")


def _find_input(base: Path, explicit: str | None, candidates: tuple[str, ...], kind: str) -> Path:
    if explicit:
        path = Path(explicit)
        if not path.exists():
            raise DataError(f"{kind} file not found: {path}")
        return path
    tried = []
    for name in candidates:
        for candidate in (base / name, base / f"{name}.gz"):
            tried.append(candidate.name)
            if candidate.exists():
                return candidate
    raise DataError(f"no {kind} file under {base}; tried {', '.join(tried)}")


def _cmd_ingest(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    base = Path(args.dataset_dir) / args.domain
    if not base.is_dir():
        base = Path(args.dataset_dir)
    split = args.split
    corpus = _find_input(base, args.corpus, _CORPUS_CANDIDATES, "corpus")
    pos = _find_input(
        base, args.pos,
        (f"{split}.pos.txt", f"{split}.pos", f"{split}_pos.txt", "pos.txt"),
        "positive pair",
    )
    neg = _find_input(
        base, args.neg,
        (f"{split}.neg.txt", f"{split}.neg", f"{split}_neg.txt", "neg.txt"),
        "negative pair",
    )
    out_dir = Path(args.out)
    report = ingest_domain(corpus, pos, neg, out_dir, domain=args.domain)
    _emit(report.lines(), None)
    _write_manifest(out_dir / "manifest.json", "ingest", args, [corpus, pos, neg], started)
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    config = SynthConfig.from_json(args.config) if args.config else SynthConfig()
    overrides = {}
    if args.label_shift is not None:
        overrides["label_shift"] = args.label_shift
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        config = SynthConfig(**{**config.__dict__, **overrides})

    source, target = synth_generate(config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_store(source, out_dir / "source.dqde")
    write_store(target, out_dir / "target.dqde")
    config.to_json(out_dir / "config.json")
    _emit(
        [
            f"source_count\t{source.count}",
            f"target_count\t{target.count}",
            f"dim\t{config.dim}",
            f"label_shift\t{config.label_shift:g}",
        ],
        None,
    )
    inputs = [Path(args.config)] if args.config else []
    _write_manifest(out_dir / "manifest.json", "synth", args, inputs, started)
    return 0


def _cmd_knn_score(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    source = read_store(args.source)
    target = read_store(args.target)
    scores = rank_targets(source, target, args.k)
    out = Path(args.out)
    write_scores_tsv(scores, target.labels, out)
    print(f"scored\t{len(scores)}")
    _write_manifest(
        Path(str(out) + ".manifest.json"), "knn-score", args,
        [Path(args.source), Path(args.target)], started,
    )
    return 0


def _cmd_probe_train(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    store = read_store(args.store)
    config = ProbeConfig(
        learning_rate=args.lr, epochs=args.epochs, l2=args.l2, seed=args.seed
    )
    model = train_probe(store, config)
    out = Path(args.out)
    save_model(model, out)
    print(f"final_loss\t{model.final_loss:.6f}")
    _write_manifest(
        Path(str(out) + ".manifest.json"), "probe-train", args, [Path(args.store)], started
    )
    return 0


def _cmd_probe_score(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    model = load_model(args.model)
    target = read_store(args.target)
    scores = probe_score(model, target)
    out = Path(args.out)
    write_scores_tsv(scores, target.labels, out)
    print(f"scored\t{len(scores)}")
    _write_manifest(
        Path(str(out) + ".manifest.json"), "probe-score", args,
        [Path(args.model), Path(args.target)], started,
    )
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    pairs = read_scores_tsv(args.scores)
    curve = roc(pairs)
    lines = [f"auc@{args.cap:g}\t{auc_at(curve, args.cap):.6f}"]
    if args.cap != 1.0:
        lines.append(f"auc@1\t{auc_at(curve, 1.0):.6f}")
    lines.append(f"positives\t{curve.positives}")
    lines.append(f"negatives\t{curve.negatives}")
    out = Path(args.out) if args.out else None
    _emit(lines, out)
    if out is not None:
        _write_manifest(
            Path(str(out) + ".manifest.json"), "eval", args, [Path(args.scores)], started
        )
    return 0


def _cmd_lexstats(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    rows_a = read_corpus_file(args.corpus_a)
    rows_b = read_corpus_file(args.corpus_b)
    corpus_a = TokenizedCorpus.build(rows_a, title_only=args.title_only)
    corpus_b = TokenizedCorpus.build(rows_b, title_only=args.title_only)

    lines = []
    inputs = [Path(args.corpus_a), Path(args.corpus_b)]
    if args.pairs:
        inputs.append(Path(args.pairs))
        texts = {
            qid: (title if args.title_only else f"{title} {body}")
            for qid, title, body in rows_a
        }
        triples = []
        for id1, id2, label in read_pairs_tsv(args.pairs):
            for qid in (id1, id2):
                if qid not in texts:
                    raise DataError(f"pair id {qid!r} not in corpus {args.corpus_a}")
            triples.append((texts[id1], texts[id2], label))
        dup_mean, nondup_mean = class_mean_jaccard(triples)
        lines.append(f"dup_mean_jaccard\t{'NA' if dup_mean is None else f'{dup_mean:.6f}'}")
        lines.append(
            f"nondup_mean_jaccard\t{'NA' if nondup_mean is None else f'{nondup_mean:.6f}'}"
        )
    lines.append(f"vocab_jaccard\t{vocab_jaccard(corpus_a, corpus_b):.6f}")
    lines.append(f"questions_a\t{corpus_a.question_count}")
    lines.append(f"questions_b\t{corpus_b.question_count}")
    lines.append(f"vocab_size_a\t{len(corpus_a.vocabulary)}")
    lines.append(f"vocab_size_b\t{len(corpus_b.vocabulary)}")
    out = Path(args.out) if args.out else None
    _emit(lines, out)
    if out is not None:
        _write_manifest(
            Path(str(out) + ".manifest.json"), "lexstats", args, inputs, started
        )
    return 0


# --- parser ----------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="dqde", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"dqde {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("inspect", help="print header and label summary of a .dqde file")
    p.add_argument("file")
    p.set_defaults(func=_cmd_inspect)

    p = sub.add_parser("ingest", help="normalize a released dataset domain into TSVs")
    p.add_argument("dataset_dir")
    p.add_argument("--domain", required=True)
    p.add_argument("--split", default="train", help="pair file split prefix (default: train)")
    p.add_argument("--corpus", help="explicit corpus file (overrides discovery)")
    p.add_argument("--pos", help="explicit positive pair file")
    p.add_argument("--neg", help="explicit negative pair file")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("synth", help="generate the seeded synthetic source/target stores")
    p.add_argument("--config", help="JSON config (default: built-in documented config)")
    p.add_argument("--label-shift", type=float, default=None, dest="label_shift")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("knn-score", help="score target rows by neighbor label mass")
    p.add_argument("--source", required=True, help="labeled source .dqde")
    p.add_argument("--target", required=True, help="target .dqde")
    p.add_argument("--k", type=int, default=100, help="neighbors per query (default: 100)")
    p.add_argument("--out", required=True, help="scores TSV")
    p.set_defaults(func=_cmd_knn_score)

    p = sub.add_parser("probe-train", help="train the linear probe on a labeled store")
    p.add_argument("--store", required=True, help="labeled source .dqde")
    p.add_argument("--lr", type=float, default=ProbeConfig.learning_rate)
    p.add_argument("--epochs", type=int, default=ProbeConfig.epochs)
    p.add_argument("--l2", type=float, default=ProbeConfig.l2)
    p.add_argument("--seed", type=int, default=ProbeConfig.seed)
    p.add_argument("--out", required=True, help="model TSV")
    p.set_defaults(func=_cmd_probe_train)

    p = sub.add_parser("probe-score", help="score target rows with a trained probe")
    p.add_argument("--model", required=True, help="model TSV from probe-train")
    p.add_argument("--target", required=True, help="target .dqde")
    p.add_argument("--out", required=True, help="scores TSV")
    p.set_defaults(func=_cmd_probe_score)

    p = sub.add_parser("eval", help="normalized partial AUC of a scores TSV")
    p.add_argument("--scores", required=True, help="scores TSV with gold labels")
    p.add_argument("--cap", type=float, default=0.05, help="FPR cap (default: 0.05)")
    p.add_argument("--out", help="also write the report TSV here")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("lexstats", help="pair and vocabulary Jaccard overlap report")
    p.add_argument("--corpus-a", required=True, dest="corpus_a")
    p.add_argument("--corpus-b", required=True, dest="corpus_b")
    p.add_argument("--pairs", help="pair TSV over corpus A for per-class means")
    p.add_argument("--title-only", action="store_true", dest="title_only")
    p.add_argument("--out", help="also write the report TSV here")
    p.set_defaults(func=_cmd_lexstats)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (DataError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
