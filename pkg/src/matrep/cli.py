"""Command-line entry point: ``matrep <subcommand>``."""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from matrep import __version__
from matrep.corpus import Corpus, read_labels
from matrep.datasets import prepare_20newsgroups, prepare_movie_reviews
from matrep.embio import read_embeddings, write_embeddings
from matrep.evaluation.cluster import spectral_cluster, stratified_subsample
from matrep.evaluation.knn import knn_classify, train_test_split
from matrep.evaluation.metrics import cluster_report, f1_scores
from matrep.evaluation.sts import load_sts, sts_evaluate
from matrep.experiments import STS_OVERRIDES, classification_run, clustering_run, grid, over_seeds, sts_run
from matrep.trainer import ConfigError, TrainConfig, train

log = logging.getLogger("matrep")


class CliError(Exception):
    pass


def sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def report(values: dict, summary: str | None = None) -> None:
    for key, val in values.items():
        if isinstance(val, (list, dict)):
            continue
        print(f"{key}={val:.6f}" if isinstance(val, float) else f"{key}={val}")
    if summary:
        Path(summary).write_text(json.dumps(values, indent=2, default=str) + "\n", encoding="utf-8")


def _add_train_flags(p: argparse.ArgumentParser, iters=35, window=5, negative=2) -> None:
    g = p.add_argument_group("training")
    g.add_argument("--size", type=int, default=100, help="rows p of every matrix")
    g.add_argument("--word-cols", type=int, default=1, help="columns r1 of word matrices")
    g.add_argument("--doc-cols", type=int, default=1, help="columns r2 of document matrices")
    g.add_argument("--window", type=int, default=window)
    g.add_argument("--negative", type=int, default=negative)
    g.add_argument("--iter", type=int, default=iters)
    g.add_argument("--margin", type=float, default=0.15)
    g.add_argument("--alpha", type=float, default=0.025)
    g.add_argument("--min-count", type=int, default=5)
    g.add_argument("--sample", type=float, default=1e-3)
    g.add_argument("--threads", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--negative-reduction", choices=("sum", "mean"), default="sum")


def config_from_args(args) -> TrainConfig:
    return TrainConfig(
        p=args.size, r1=args.word_cols, r2=args.doc_cols, margin=args.margin, alpha=args.alpha,
        iterations=args.iter, max_window=args.window, negatives=args.negative,
        min_count=args.min_count, sample=args.sample, threads=args.threads, seed=args.seed,
        negative_reduction=args.negative_reduction,
    )


def _seeds(args) -> list[int]:
    return [args.seed + i for i in range(args.seeds)]


def cmd_train(args) -> int:
    if args.from_manifest:
        manifest = json.loads(Path(args.from_manifest).read_text(encoding="utf-8"))
        config = TrainConfig(**manifest["config"])
        corpus_path = args.train or manifest["corpus"]["path"]
    else:
        config = config_from_args(args)
        corpus_path = args.train
    if not corpus_path:
        raise CliError("--train is required")
    if not Path(corpus_path).exists():
        raise CliError(f"corpus not found: {corpus_path}")
    started = time.time()
    t0 = time.perf_counter()
    corpus = Corpus.from_file(corpus_path, config.min_count)
    model = train(corpus, config)
    train_seconds = time.perf_counter() - t0
    binary = bool(args.binary)
    write_embeddings(args.word_out, corpus.vocab.tokens, model.center, binary)
    write_embeddings(args.doc_out, [str(i) for i in range(len(corpus))], model.docs, binary)
    manifest = {
        "tool": "matrep",
        "version": __version__,
        "config": config.to_dict(),
        "seed": config.seed,
        "corpus": {
            "path": str(corpus_path),
            "sha256": sha256(corpus_path),
            "documents": len(corpus),
            "vocabulary": len(corpus.vocab),
            "tokens": corpus.vocab.total_tokens,
        },
        "outputs": {"word": str(args.word_out), "doc": str(args.doc_out), "binary": binary},
        "timings": {"started": started, "train_seconds": train_seconds},
        "epoch_losses": [float(x) for x in model.epoch_losses],
    }
    manifest_path = args.manifest_out or f"{args.doc_out}.manifest.json"
    Path(manifest_path).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    report({"documents": len(corpus), "vocabulary": len(corpus.vocab),
            "final_loss": float(model.epoch_losses[-1]), "manifest": manifest_path})
    return 0


def _load_bank_and_labels(docs: str, labels: str, binary: bool):
    _, bank = read_embeddings(docs, binary)
    labs = read_labels(labels)
    if len(labs) != bank.shape[0]:
        raise CliError(f"{labels} has {len(labs)} labels but {docs} has {bank.shape[0]} embeddings")
    return bank, labs


def cmd_cluster(args) -> int:
    bank, labels = _load_bank_and_labels(args.docs, args.labels, args.binary)
    idx = np.arange(len(labels))
    if args.subsample:
        idx = stratified_subsample(labels, args.subsample, args.seed)
    clusters = spectral_cluster(bank[idx], args.k, args.gamma, seed=args.seed)
    report(cluster_report(clusters, [labels[i] for i in idx]), args.summary)
    return 0


def cmd_classify(args) -> int:
    if args.docs:
        bank, labels = _load_bank_and_labels(args.docs, args.labels, args.binary)
        if args.split_file:
            tags = read_labels(args.split_file)
            if len(tags) != len(labels):
                raise CliError("split file and labels differ in length")
            tr = np.array([i for i, t in enumerate(tags) if t == "train"])
            te = np.array([i for i, t in enumerate(tags) if t == "test"])
        else:
            tr, te = train_test_split(len(labels), args.split, args.seed)
        train_bank, train_labels = bank[tr], [labels[i] for i in tr]
        test_bank, test_labels = bank[te], [labels[i] for i in te]
    else:
        if not (args.train_docs and args.train_labels and args.test_docs and args.test_labels):
            raise CliError("give --docs/--labels or all of --train-docs/--train-labels/--test-docs/--test-labels")
        train_bank, train_labels = _load_bank_and_labels(args.train_docs, args.train_labels, args.binary)
        test_bank, test_labels = _load_bank_and_labels(args.test_docs, args.test_labels, args.binary)
    pred = knn_classify(train_bank, train_labels, test_bank, args.knn)
    macro, micro = f1_scores(pred, test_labels)
    report({"macro_f1": macro, "micro_f1": micro, "train": len(train_labels), "test": len(test_labels)},
           args.summary)
    return 0


def cmd_sts(args) -> int:
    data = load_sts(args.sts_dir)
    print(f"pairs={len(data.pairs)}")
    print(f"skipped_rows={data.skipped}")
    if args.docs:
        _, bank = read_embeddings(args.docs, args.binary)
        if bank.shape[0] != len(data.sentences):
            raise CliError(f"{args.docs} has {bank.shape[0]} entries, expected {len(data.sentences)}")
        dev, test = sts_evaluate(bank, data.pairs)
        report({"dev_pearson": dev, "test_pearson": test}, args.summary)
        return 0
    config = config_from_args(args)
    res = over_seeds(lambda c: sts_run(data, c), config, _seeds(args))
    report(res, args.summary)
    return 0


def cmd_sweep(args) -> int:
    base = config_from_args(args)
    corpus = labels = data = None
    if args.task == "sts":
        data = load_sts(args.sts_dir)
    else:
        corpus = Corpus.from_file(args.corpus, base.min_count)
        labels = read_labels(args.labels)
    if args.task == "cluster":
        cells = [(1, r2) for r2 in range(1, args.max_cols + 1)]
    else:
        cells = grid(args.max_cols)
    if args.task == "classify":
        if args.split_file:
            tags = read_labels(args.split_file)
            tr = [i for i, t in enumerate(tags) if t == "train"]
            te = [i for i, t in enumerate(tags) if t == "test"]
        else:
            tr, te = train_test_split(len(labels), args.split, args.seed)
    results = {}
    for r1, r2 in cells:
        config = dataclasses.replace(base, r1=r1, r2=r2)
        if args.task == "sts":
            run = lambda c: sts_run(data, c)  # noqa: E731
        elif args.task == "cluster":
            run = lambda c: clustering_run(corpus, labels, c, args.k, args.gamma, args.subsample)  # noqa: E731
        else:
            run = lambda c: classification_run(corpus, labels, tr, te, c, args.knn)  # noqa: E731
        res = over_seeds(run, config, _seeds(args))
        results[f"r1={r1},r2={r2}"] = res
        for key, val in res.items():
            if not isinstance(val, list):
                print(f"r1={r1} r2={r2} {key}={val:.6f}")
        sys.stdout.flush()
    if args.summary:
        Path(args.summary).write_text(json.dumps(results, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_prep(args) -> int:
    fn = prepare_20newsgroups if args.command == "prep-20ng" else prepare_movie_reviews
    n = fn(args.raw_dir, args.out_dir)
    print(f"documents={n}")
    print(f"output={args.out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matrep", description="Matrix-valued spherical text embeddings: training and evaluation."
    )
    parser.add_argument("--version", action="version", version=f"matrep {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train word and document embeddings")
    p.add_argument("--train", help="corpus, one document per line")
    p.add_argument("--word-out", required=True)
    p.add_argument("--doc-out", required=True)
    p.add_argument("--binary", type=int, choices=(0, 1), default=0)
    p.add_argument("--manifest-out")
    p.add_argument("--from-manifest", help="reuse the configuration recorded in a manifest")
    _add_train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("cluster", help="spectral clustering of document embeddings")
    p.add_argument("--docs", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--gamma", type=float, default=0.001)
    p.add_argument("--subsample", type=int, default=None, help="stratified sample size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--binary", type=int, choices=(0, 1), default=0)
    p.add_argument("--summary", help="write a JSON summary here")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("classify", help="k-NN classification of document embeddings")
    p.add_argument("--train-docs")
    p.add_argument("--train-labels")
    p.add_argument("--test-docs")
    p.add_argument("--test-labels")
    p.add_argument("--docs", help="single embedding file to split")
    p.add_argument("--labels")
    p.add_argument("--split-file", help="train/test tag per line")
    p.add_argument("--split", type=float, default=0.8, help="train fraction for a random split")
    p.add_argument("--knn", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--binary", type=int, choices=(0, 1), default=0)
    p.add_argument("--summary")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sts", help="train on STS-benchmark sentences and report Pearson")
    p.add_argument("--sts-dir", required=True)
    p.add_argument("--docs", help="score an existing document bank instead of training")
    p.add_argument("--binary", type=int, choices=(0, 1), default=0)
    p.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds to average")
    p.add_argument("--summary")
    _add_train_flags(p, iters=STS_OVERRIDES["iterations"], window=STS_OVERRIDES["max_window"],
                     negative=STS_OVERRIDES["negatives"])
    p.set_defaults(func=cmd_sts)

    p = sub.add_parser("sweep", help="evaluate every (r1, r2) cell of a grid")
    p.add_argument("--task", choices=("cluster", "classify", "sts"), required=True)
    p.add_argument("--corpus")
    p.add_argument("--labels")
    p.add_argument("--sts-dir")
    p.add_argument("--split-file")
    p.add_argument("--split", type=float, default=0.8)
    p.add_argument("--knn", type=int, default=3)
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--gamma", type=float, default=0.001)
    p.add_argument("--subsample", type=int, default=4000)
    p.add_argument("--max-cols", type=int, default=None, help="default 4 (6 for cluster)")
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--summary")
    _add_train_flags(p)
    p.set_defaults(func=cmd_sweep)

    for name, helptext in (("prep-20ng", "convert 20news-bydate to corpus/labels/split files"),
                           ("prep-movies", "convert the movie-review polarity dataset")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("raw_dir")
        p.add_argument("out_dir")
        p.set_defaults(func=cmd_prep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    if args.command == "sweep":
        if args.max_cols is None:
            args.max_cols = 6 if args.task == "cluster" else 4
        if args.task == "sts":
            if not args.sts_dir:
                parser.error("--sts-dir is required for --task sts")
            # flags left at their generic defaults take the STS settings
            for flag, key, generic in (("iter", "iterations", 35), ("window", "max_window", 5),
                                       ("negative", "negatives", 2)):
                if getattr(args, flag) == generic:
                    setattr(args, flag, STS_OVERRIDES[key])
        elif not (args.corpus and args.labels):
            parser.error("--corpus and --labels are required")
    try:
        return args.func(args)
    except (CliError, ConfigError, ValueError, OSError, KeyError) as exc:
        print(f"matrep: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
