"""Command-line interface.

Subcommands: train, tag, decode-triplets, eval, stats, runs.  Inputs are
never mutated; data goes to --out or stdout, diagnostics to stderr.
Exit status: 0 ok, 1 data/model error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import net
from .corpus import COUNTED_TAGS, Corpus, corpus_stats, read_corpus, write_corpus
from .decoder import tag2triplet
from .embeddings import EmbeddingTable, load_contextual, load_word_table
from .errors import CausalExError
from .evaluate import (
    aggregate_runs,
    format_report_row,
    single_ratios,
    triplet_prf,
)
from .scheme import TAGS, repair_tags
from .train import TrainConfig, load_config, train


def _read_corpus_file(path: str) -> Corpus:
    return read_corpus(Path(path).read_bytes(), name=Path(path).stem)


def _load_word_table_arg(path: str | None) -> EmbeddingTable | None:
    if path is None:
        return None
    return load_word_table(Path(path).read_bytes())


def _load_contextual_arg(path: str | None):
    if path is None:
        return None
    return load_contextual(Path(path).read_bytes())


def _triplet_lines(corpus: Corpus) -> list[str]:
    lines = []
    for sentence, tags in corpus.sentences:
        for t in tag2triplet(sentence, tags):
            lines.append(
                f"{sentence.id}\t{t.cause[0]}\t{t.cause[1]}"
                f"\t{t.effect[0]}\t{t.effect[1]}"
                f"\t{t.cause_text(sentence)}\t{t.effect_text(sentence)}"
            )
    return lines


def _write_output(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _corpus_triplets(corpus: Corpus):
    return {
        s.id: tag2triplet(s, tags) for s, tags in corpus.sentences
    }


def _cmd_train(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    corpus = _read_corpus_file(args.corpus)
    words = _load_word_table_arg(args.embeddings)
    ctx = _load_contextual_arg(args.contextual)
    result = train(corpus, words, config, ctx)
    Path(args.out).write_bytes(net.save_checkpoint(result.params, result.word_table))
    if args.log:
        Path(args.log).write_text(result.log_text(), encoding="utf-8")
    print(
        f"best epoch {result.best_epoch} val F1 {result.best_val_f1:.4f}",
        file=sys.stderr,
    )
    return 0


def _resolve_config(args: argparse.Namespace) -> TrainConfig:
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "config", None):
        return load_config(Path(args.config).read_text(encoding="utf-8"), **overrides)
    return TrainConfig(**overrides)


def _cmd_tag(args: argparse.Namespace) -> int:
    params, words = net.load_checkpoint(Path(args.model).read_bytes())
    corpus = _read_corpus_file(args.corpus)
    ctx = _load_contextual_arg(args.contextual)
    if args.embeddings:
        words = _load_word_table_arg(args.embeddings)
    from .embeddings import assemble_inputs

    tagged = []
    for sentence, _ in corpus.sentences:
        bundle = assemble_inputs(sentence, words, params.alphabet, ctx,
                                 params.dims.ctx_dim)
        pred = net.decode_sentence(params, bundle)
        tags = tuple(TAGS[i] for i in pred)
        if not args.no_repair:
            tags = repair_tags(tags)
        tagged.append((sentence, tags))
    blob = write_corpus(Corpus(tagged, name=corpus.name))
    if args.out:
        Path(args.out).write_bytes(blob)
    else:
        sys.stdout.write(blob.decode("utf-8"))
    return 0


def _cmd_decode_triplets(args: argparse.Namespace) -> int:
    corpus = _read_corpus_file(args.input)
    lines = _triplet_lines(corpus)
    _write_output("".join(line + "\n" for line in lines), args.out)
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    gold = _corpus_triplets(_read_corpus_file(args.gold))
    pred = _corpus_triplets(_read_corpus_file(args.pred))
    m = triplet_prf(gold, pred)
    print(f"P {m.precision:.4f} R {m.recall:.4f} F {m.f1:.4f}")
    if args.ratios:
        ratios = single_ratios(gold, pred)
        print(f"RS-C {ratios.rs_c:.4f} RS-E {ratios.rs_e:.4f}")
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    stats = corpus_stats(_read_corpus_file(args.corpus))
    lines = [f"{tag}\t{stats.counts[tag]}" for tag in COUNTED_TAGS]
    lines.append(f"Sum\t{stats.total}")
    _write_output("".join(line + "\n" for line in lines), args.out)
    return 0


def _cmd_runs(args: argparse.Namespace) -> int:
    from .evaluate import Metrics
    from .train import _prepare_bundles, evaluate_model

    config = _resolve_config(args)
    corpus = _read_corpus_file(args.corpus)
    words = _load_word_table_arg(args.embeddings)
    ctx = _load_contextual_arg(args.contextual)
    test = _read_corpus_file(args.test) if args.test else None

    metrics = []
    for run_index in range(args.runs):
        run_config = TrainConfig(
            **{**config.__dict__, "seed": config.seed + run_index})
        result = train(corpus, words, run_config, ctx)
        if test is not None:
            bundles = _prepare_bundles(
                test, result.word_table, result.params.alphabet, ctx,
                result.params.dims.ctx_dim)
            metrics.append(evaluate_model(result.params, bundles))
        else:
            best = max(result.history, key=lambda r: r.val_f, default=None)
            if best is None:
                raise CausalExError("no epochs ran; cannot aggregate")
            metrics.append(Metrics(
                precision=best.val_p, recall=best.val_r, f1=best.val_f,
                correct=0, predicted=0, gold=0))
        print(f"run {run_index} F1 {metrics[-1].f1:.4f}", file=sys.stderr)
    print(format_report_row(args.name, aggregate_runs(metrics)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalex",
        description="Cause-effect triplet extraction toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a tagger and save a checkpoint")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", help="word-vector table (text format)")
    p.add_argument("--contextual", help="precomputed contextual store (CTXE)")
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--log", help="training-log path")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("tag", help="tag a corpus with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", help="override the checkpoint word table")
    p.add_argument("--contextual")
    p.add_argument("--out")
    p.add_argument("--no-repair", action="store_true",
                   help="keep raw Viterbi output even if ill-formed")
    p.set_defaults(func=_cmd_tag)

    p = sub.add_parser("decode-triplets", help="tagged corpus -> triplet TSV")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_decode_triplets)

    p = sub.add_parser("eval", help="triplet P/R/F of predicted vs gold tags")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--ratios", action="store_true",
                   help="also report single cause/effect ratios")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("stats", help="per-tag-type counts")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("runs", help="repeat train+eval and aggregate")
    p.add_argument("--config")
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings")
    p.add_argument("--contextual")
    p.add_argument("--test", help="held-out corpus; defaults to validation F1")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int)
    p.add_argument("--name", default="model", help="report row label")
    p.set_defaults(func=_cmd_runs)
    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CausalExError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))
