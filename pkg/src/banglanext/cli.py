"""Command-line workflow: build -> train -> predict/complete/eval/serve.

Exit codes: 0 ok, 1 usage error, 2 data error, 3 model error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .backoff import BackoffModel
from .config import RunConfig, load_config, save_config
from .dataset import NGramDataset, build_dataset, dataset_stats
from .errors import (
    BanglanextError,
    EmptyContext,
    EmptyCorpus,
    FormatVersionError,
    InvalidEncoding,
    MissingModel,
    OrderMismatch,
)
from .neural import ModelConfig, forward_batch, init_model, save_model
from .predictor import ModelBundle, complete_sentence, suggest
from .text import (
    RawDocument,
    Vocabulary,
    build_vocabulary,
    normalize,
    read_corpus_file,
    split_sentences,
    tokenize,
)
from .training import TrainOptions, TrainReport, train

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_MODEL = 3

SENTENCES_HEADER = "banglanext-sentences v1"
STATS_FORMAT_VERSION = 1


def _dataset_path(out: Path, order: int) -> Path:
    return out / f"dataset_order{order}.txt"


def _report_path(out: Path, order: int) -> Path:
    return out / f"train_order{order}.csv"


def _err(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


# -- config resolution -------------------------------------------------------


def _resolve_config(args) -> RunConfig:
    """Explicit --config wins, else the run_config.txt living in --out, else
    defaults; individual flags override either."""
    if getattr(args, "config", None):
        cfg = load_config(args.config)
    elif getattr(args, "out", None) and (Path(args.out) / "run_config.txt").exists():
        cfg = load_config(Path(args.out) / "run_config.txt")
    else:
        cfg = RunConfig()
    updates = {}
    if getattr(args, "corpus", None):
        updates["corpus_paths"] = tuple(args.corpus)
    if getattr(args, "out", None):
        updates["out_dir"] = args.out
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "engine", None):
        updates["engine"] = args.engine
    if getattr(args, "order", None) is not None:
        updates["orders"] = (args.order,)
    if getattr(args, "k", None) is not None:
        updates["k"] = args.k
    if getattr(args, "max_len", None) is not None:
        updates["max_len"] = args.max_len
    if getattr(args, "epochs", None) is not None:
        updates["epochs"] = args.epochs
    cfg = replace(cfg, **updates)
    cfg.validate()
    return cfg


def _save_sentences(path, sentences: list[list[int]], vocab_size: int) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{SENTENCES_HEADER}\n")
        fh.write(f"vocab_size={vocab_size}\n")
        for sent in sentences:
            fh.write(" ".join(str(i) for i in sent) + "\n")


def _load_sentences(path) -> tuple[list[list[int]], int]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != SENTENCES_HEADER:
            raise FormatVersionError(f"{path}: bad header {header!r}")
        vocab_size = int(fh.readline().split("=")[1])
        sentences = [[int(t) for t in line.split()] for line in fh if line.strip()]
    return sentences, vocab_size


# -- commands ----------------------------------------------------------------


def cmd_build(cfg: RunConfig) -> int:
    if not cfg.corpus_paths:
        _err("build needs at least one --corpus path")
        return EXIT_USAGE
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    sources = []
    all_sentences: list[list[str]] = []
    for path in cfg.corpus_paths:
        if not Path(path).exists():
            _err(f"corpus file not found: {path}")
            return EXIT_DATA
        doc = read_corpus_file(path, source_name=Path(path).name)
        tokens = tokenize(normalize(doc, cfg.cleaning))
        sources.append(
            {"name": doc.source_name, "distinct_words": len(set(tokens)), "total_words": len(tokens)}
        )
        all_sentences.extend(split_sentences(tokens, cfg.cleaning.terminators))

    try:
        vocab = build_vocabulary(all_sentences, cfg.min_count, cfg.cleaning.terminators)
    except EmptyCorpus as exc:
        _err(str(exc))
        return EXIT_DATA
    encoded = [vocab.encode_tokens(s) for s in all_sentences]

    vocab.save(out / "vocab.json")
    _save_sentences(out / "sentences.txt", encoded, vocab.size)
    per_order = []
    for order in cfg.orders:
        ds = build_dataset(encoded, order, vocab.size)
        ds.save(_dataset_path(out, order))
        per_order.append({"order": order, **dataset_stats(ds)})
    stats = {
        "version": STATS_FORMAT_VERSION,
        "sources": sources,
        "sentences": len(all_sentences),
        "vocab_size": vocab.size,
        "datasets": per_order,
    }
    with open(out / "build_stats.json", "w", encoding="utf-8") as fh:
        json.dump(stats, fh, ensure_ascii=False, sort_keys=True, indent=2)
        fh.write("\n")
    save_config(cfg, out / "run_config.txt")

    print(f"vocabulary: {vocab.size} tokens, {len(all_sentences)} sentences")
    for row in sources:
        print(f"  source {row['name']}: {row['distinct_words']} distinct / {row['total_words']} total words")
    for row in per_order:
        print(f"  order {row['order']}: {row['example_count']} examples, {row['distinct_contexts']} distinct contexts")
    return EXIT_OK


def cmd_train(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    try:
        vocab = Vocabulary.load(out / "vocab.json")
        sentences, _ = _load_sentences(out / "sentences.txt")
        datasets = {n: NGramDataset.load(_dataset_path(out, n)) for n in cfg.orders}
    except FileNotFoundError as exc:
        _err(f"build artifacts missing ({exc}); run 'banglanext build' first")
        return EXIT_DATA

    reports: dict[int, TrainReport] = {}
    opts_base = TrainOptions(
        epochs=cfg.epochs,
        batch_size=cfg.batch_size,
        learning_rate=cfg.learning_rate,
        beta1=cfg.beta1,
        beta2=cfg.beta2,
        eps=cfg.eps,
        optimizer=cfg.optimizer,
    )
    for order in cfg.orders:
        model_cfg = ModelConfig(
            vocab_size=vocab.size,
            context_len=order,
            embed_dim=cfg.embed_dim,
            lstm_units=cfg.lstm_units,
            dense_hidden=cfg.dense_hidden,
            seed=cfg.seed * 10 + order,
        )
        model = init_model(model_cfg)
        trained, report = train(model, datasets[order], replace(opts_base, seed=cfg.seed * 10 + order))
        reports[order] = report
        save_model(trained, out / f"neural_order{order}.ckpt")
        report.save_csv(_report_path(out, order))
        final = (
            f"loss {report.final_loss:.4f} acc {report.final_accuracy:.4f}"
            if len(report)
            else "no examples"
        )
        print(f"order {order}: {len(report)} epochs, {final}, {report.wall_time_s:.1f}s")

    statistical = BackoffModel.fit(sentences, vocab.size, max_order=max(cfg.orders))
    statistical.save(out / "backoff.txt")
    manifest = {
        "version": 1,
        "terminators": list(cfg.cleaning.terminators),
        "neural_orders": list(cfg.orders),
        "statistical": True,
    }
    with open(out / "bundle.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, ensure_ascii=False, sort_keys=True, indent=0)
        fh.write("\n")
    if cfg.figures:
        from .report import render_training_curves

        render_training_curves(reports, out)
    save_config(cfg, out / "run_config.txt")
    return EXIT_OK


def _load_bundle(cfg: RunConfig) -> ModelBundle:
    return ModelBundle.load(cfg.out_dir)


def _context_tokens(cfg: RunConfig, raw: str) -> list[str]:
    return tokenize(normalize(RawDocument("cli", raw), cfg.cleaning))


def cmd_predict(cfg: RunConfig, context: str) -> int:
    try:
        bundle = _load_bundle(cfg)
    except (FileNotFoundError, FormatVersionError) as exc:
        _err(f"cannot load bundle from {cfg.out_dir}: {exc}")
        return EXIT_MODEL
    tokens = _context_tokens(cfg, context)
    if not tokens:
        _err("context is empty after cleaning")
        return EXIT_USAGE
    k = cfg.k
    if k > bundle.vocabulary.size:
        _warn(f"k={k} larger than vocabulary; clamping to {bundle.vocabulary.size}")
        k = bundle.vocabulary.size
    try:
        candidates = suggest(bundle, tokens, k=k, engine=cfg.engine)
    except (MissingModel, EmptyContext) as exc:
        _err(str(exc))
        return EXIT_MODEL
    for cand in candidates:
        print(f"{cand.token} p={cand.probability:.6f}")
    return EXIT_OK


def cmd_complete(cfg: RunConfig, prefix: str) -> int:
    try:
        bundle = _load_bundle(cfg)
    except (FileNotFoundError, FormatVersionError) as exc:
        _err(f"cannot load bundle from {cfg.out_dir}: {exc}")
        return EXIT_MODEL
    tokens = _context_tokens(cfg, prefix)
    if not tokens:
        _err("prefix is empty after cleaning")
        return EXIT_USAGE
    try:
        completion = complete_sentence(bundle, tokens, engine=cfg.engine, max_len=cfg.max_len)
    except (MissingModel, EmptyContext) as exc:
        _err(str(exc))
        return EXIT_MODEL
    print(" ".join(completion.tokens))
    if completion.terminated_by == "length-cap":
        _warn(f"length-cap hit after {completion.steps} generated tokens")
    return EXIT_OK


def cmd_eval(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    try:
        bundle = _load_bundle(cfg)
        datasets = {n: NGramDataset.load(_dataset_path(out, n)) for n in cfg.orders}
    except (FileNotFoundError, FormatVersionError) as exc:
        _err(str(exc))
        return EXIT_MODEL
    rows = []
    for engine in ("neural", "statistical"):
        for order in cfg.orders:
            ds = datasets[order]
            if len(ds) == 0:
                rows.append({"engine": engine, "order": order, "examples": 0, "accuracy": 0.0})
                continue
            if engine == "neural":
                probs = forward_batch(bundle.neural[order], ds.contexts)
                acc = float((probs.argmax(axis=1) == ds.targets).mean())
            else:
                hits = sum(
                    bundle.statistical.predict_next(tuple(ctx))[0] == tgt
                    for ctx, tgt in zip(ds.contexts.tolist(), ds.targets.tolist())
                )
                acc = hits / len(ds)
            rows.append({"engine": engine, "order": order, "examples": len(ds), "accuracy": acc})
            print(f"{engine} order {order}: top-1 accuracy {acc:.4f} over {len(ds)} examples")
    with open(out / "eval.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["engine", "order", "examples", "accuracy"])
        for row in rows:
            writer.writerow([row["engine"], row["order"], row["examples"], repr(row["accuracy"])])
    if cfg.figures:
        from .report import render_eval_bars

        render_eval_bars(rows, out)
    return EXIT_OK


def cmd_serve(cfg: RunConfig, port: int, cors_origin: str, static_dir: str | None) -> int:
    from .server import SuggestServer

    try:
        bundle = _load_bundle(cfg)
    except (FileNotFoundError, FormatVersionError) as exc:
        _err(f"cannot load bundle from {cfg.out_dir}: {exc}")
        return EXIT_MODEL
    server = SuggestServer(
        bundle,
        port=port,
        cors_origin=cors_origin,
        static_dir=static_dir,
        cleaning=cfg.cleaning,
        verbose=True,
    )
    print(f"serving bundle from {cfg.out_dir} on port {server.port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--corpus", action="append", help="corpus text file (repeatable)")
    parser.add_argument("--order", type=int, help="restrict to a single n-gram order")
    parser.add_argument("--engine", choices=("neural", "statistical"))
    parser.add_argument("--k", type=int, help="number of suggestions")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="artifact directory")
    parser.add_argument("--max-len", type=int, dest="max_len")
    parser.add_argument("--epochs", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banglanext",
        description="Bangla next-word prediction and sentence completion toolkit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("build", "normalize corpora, build vocabulary and n-gram datasets"),
        ("train", "train the five neural models and the statistical model"),
        ("eval", "score both engines on the built datasets"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
    p = sub.add_parser("predict", help="print ranked next-word suggestions")
    _add_common(p)
    p.add_argument("context", help="context text")
    p = sub.add_parser("complete", help="complete a sentence from a prefix")
    _add_common(p)
    p.add_argument("prefix", help="sentence prefix")
    p = sub.add_parser("serve", help="serve suggestions over HTTP JSON")
    _add_common(p)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--cors-origin", default="*", dest="cors_origin")
    p.add_argument("--static", dest="static_dir", help="directory of UI assets to serve at /")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = _resolve_config(args)
    except (ValueError, FileNotFoundError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    try:
        if args.command == "build":
            return cmd_build(cfg)
        if args.command == "train":
            return cmd_train(cfg)
        if args.command == "predict":
            return cmd_predict(cfg, args.context)
        if args.command == "complete":
            return cmd_complete(cfg, args.prefix)
        if args.command == "eval":
            return cmd_eval(cfg)
        if args.command == "serve":
            return cmd_serve(cfg, args.port, args.cors_origin, args.static_dir)
    except InvalidEncoding as exc:
        _err(str(exc))
        return EXIT_DATA
    except (FormatVersionError, EmptyCorpus) as exc:
        _err(str(exc))
        return EXIT_DATA
    except (MissingModel, OrderMismatch) as exc:
        _err(str(exc))
        return EXIT_MODEL
    except BanglanextError as exc:
        _err(str(exc))
        return EXIT_DATA
    parser.error(f"unknown command {args.command}")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
