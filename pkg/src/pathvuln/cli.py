"""Command-line interface.

Subcommands: extract (corpus -> context files), train (context files ->
checkpoint), evaluate (checkpoint + context file -> metrics), predict
(checkpoint + C source -> per-function labels), synth (demo corpus).

Exit codes: 0 success, 1 usage error, 2 data/input error, 3 internal
error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import traceback

from .c2v import extract_split, read_c2v, write_c2v
from .corpus import SplitCorpus, corpus_stats
from .errors import PathVulnError, Unscorable
from .evaluation import evaluate, format_percent, score_source
from .checkpoint import load_checkpoint, save_checkpoint
from .manifest import write_manifest
from .paths import MiningLimits
from .training import TrainConfig, train
from .vocab import Vocabulary, build_vocabularies, encode_bag, vocab_digest

log = logging.getLogger(__name__)


class _ArgumentParser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; we reserve 2 for
    data problems, so usage errors exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_mining_flags(parser):
    parser.add_argument("--max-length", type=int, default=8, metavar="N",
                        help="maximum tree edges per path (default 8)")
    parser.add_argument("--max-width", type=int, default=3, metavar="N",
                        help="maximum sibling spread at the path top (default 3)")
    parser.add_argument("--max-contexts", type=int, default=200, metavar="N",
                        help="most contexts kept per function (default 200)")


def _limits(args) -> MiningLimits:
    return MiningLimits(
        max_length=args.max_length,
        max_width=args.max_width,
        max_contexts=args.max_contexts,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="pathvuln",
        description="Vulnerability detection over AST path contexts of C functions.",
    )
    parser.add_argument("--log-level", default="info",
                        choices=("debug", "info", "warning", "error"))
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("extract", help="mine path contexts from a JSONL corpus")
    p.add_argument("--train", required=True, help="training split (JSON Lines)")
    p.add_argument("--valid", required=True, help="validation split (JSON Lines)")
    p.add_argument("--test", required=True, help="test split (JSON Lines)")
    p.add_argument("--out", required=True, help="output directory")
    _add_mining_flags(p)
    p.add_argument("--seed", type=int, default=0, help="context downsampling seed")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel extraction processes (default 1)")
    p.add_argument("--ast-input", action="store_true",
                   help="'func' fields hold JSON ASTs instead of C source")
    p.set_defaults(handler=cmd_extract)

    p = sub.add_parser("train", help="train a model on extracted context files")
    p.add_argument("--data", required=True,
                   help="directory containing train.c2v and valid.c2v")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--batch-size", type=int, default=1024)
    p.add_argument("--embedding-size", type=int, default=128)
    p.add_argument("--dropout", type=float, default=0.25)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-count", type=int, default=1,
                   help="drop tokens rarer than this from the vocabularies")
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("evaluate", help="score a context file against a checkpoint")
    p.add_argument("--checkpoint", required=True, help="model checkpoint path")
    p.add_argument("--data", required=True, help="context file to evaluate (.c2v)")
    p.add_argument("--vocab-dir", default=None,
                   help="directory with vocabulary tables (default: checkpoint dir)")
    p.add_argument("--out", default=None,
                   help="directory for report.json and figures (default: checkpoint dir)")
    p.add_argument("--batch-size", type=int, default=1024)
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("predict", help="label every function in a C source file")
    p.add_argument("source", help="C file to score, or '-' for stdin")
    p.add_argument("--checkpoint", required=True, help="model checkpoint path")
    p.add_argument("--vocab-dir", default=None,
                   help="directory with vocabulary tables (default: checkpoint dir)")
    _add_mining_flags(p)
    p.add_argument("--seed", type=int, default=0, help="context downsampling seed")
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("synth", help="write a synthetic demo corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--count", type=int, default=2000)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(handler=cmd_synth)

    return parser


def cmd_extract(args) -> int:
    corpus = SplitCorpus.load(args.train, args.valid, args.test, ast_input=args.ast_input)
    limits = _limits(args)
    os.makedirs(args.out, exist_ok=True)
    outputs = []
    split_counts = {}
    for name, samples in corpus.items():
        bags, report = extract_split(
            samples, limits, seed=args.seed, workers=args.workers,
            from_ast_json=args.ast_input,
        )
        out_path = os.path.join(args.out, f"{name}.c2v")
        write_c2v(bags, out_path)
        outputs.append(out_path)
        vuln = sum(1 for b in bags if b.label == "vuln")
        split_counts[name] = (vuln, len(bags) - vuln)
        skips = ", ".join(f"{k} {v}" for k, v in sorted(report.skipped.items())) or "none"
        print(f"{name}: kept {report.kept}/{report.total} functions (skipped: {skips})")

    from .plots import save_label_distribution

    figure = os.path.join(args.out, "label_distribution.png")
    save_label_distribution(split_counts, figure)
    outputs.append(figure)
    write_manifest(
        os.path.join(args.out, "extract.json"),
        command="extract",
        settings={
            "max_length": limits.max_length,
            "max_width": limits.max_width,
            "max_contexts": limits.max_contexts,
            "seed": args.seed,
            "ast_input": args.ast_input,
        },
        outputs=outputs,
    )
    return 0


def cmd_train(args) -> int:
    train_path = os.path.join(args.data, "train.c2v")
    valid_path = os.path.join(args.data, "valid.c2v")
    train_bags = read_c2v(train_path)
    valid_bags = read_c2v(valid_path)
    config = TrainConfig(
        epochs=args.epochs,
        batch_size=args.batch_size,
        embedding_size=args.embedding_size,
        dropout=args.dropout,
        lr=args.lr,
        seed=args.seed,
        min_count=args.min_count,
    )
    value_vocab, path_vocab = build_vocabularies(train_bags, config.min_count)
    digest = vocab_digest(value_vocab, path_vocab)
    encoded_train = [encode_bag(b, value_vocab, path_vocab) for b in train_bags]
    encoded_valid = [encode_bag(b, value_vocab, path_vocab) for b in valid_bags]
    log.info(
        "training on %d functions (%d value tokens, %d paths)",
        len(encoded_train), len(value_vocab), len(path_vocab),
    )
    result = train(encoded_train, encoded_valid, len(value_vocab), len(path_vocab), config)

    os.makedirs(args.out, exist_ok=True)
    ckpt_path = os.path.join(args.out, "model.ckpt")
    save_checkpoint(
        ckpt_path, result.params, result.adam,
        vocab_digest=digest, config=config.as_dict(),
    )
    value_path = os.path.join(args.out, "value_vocab.tsv")
    path_path = os.path.join(args.out, "path_vocab.tsv")
    value_vocab.to_tsv(value_path)
    path_vocab.to_tsv(path_path)
    metrics_path = os.path.join(args.out, "metrics.jsonl")
    with open(metrics_path, "w", encoding="utf-8", newline="\n") as fh:
        for record in result.history:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    from .plots import save_training_curves

    figure = os.path.join(args.out, "training_curves.png")
    save_training_curves(result.history, figure)
    write_manifest(
        os.path.join(args.out, "train.json"),
        command="train",
        settings=config.as_dict(),
        outputs=[ckpt_path, value_path, path_path, metrics_path, figure],
    )
    best = result.history[result.best_epoch - 1]
    print(
        f"best epoch {result.best_epoch}/{config.epochs}: "
        f"valid F1 {format_percent(best['valid_f1'])}, "
        f"accuracy {format_percent(best['valid_accuracy'])}"
    )
    return 0


def _load_vocabs(vocab_dir) -> tuple[Vocabulary, Vocabulary]:
    return (
        Vocabulary.from_tsv(os.path.join(vocab_dir, "value_vocab.tsv")),
        Vocabulary.from_tsv(os.path.join(vocab_dir, "path_vocab.tsv")),
    )


def cmd_evaluate(args) -> int:
    vocab_dir = args.vocab_dir or os.path.dirname(os.path.abspath(args.checkpoint))
    out_dir = args.out or os.path.dirname(os.path.abspath(args.checkpoint))
    value_vocab, path_vocab = _load_vocabs(vocab_dir)
    digest = vocab_digest(value_vocab, path_vocab)
    params, _, header = load_checkpoint(args.checkpoint, expected_digest=digest)
    bags = read_c2v(args.data)
    encoded = [encode_bag(b, value_vocab, path_vocab) for b in bags]
    metrics, _ = evaluate(params, encoded, batch_size=args.batch_size)

    print(f"functions: {metrics.total} "
          f"(tp {metrics.tp}, fp {metrics.fp}, tn {metrics.tn}, fn {metrics.fn})")
    print(f"accuracy:  {format_percent(metrics.accuracy)}")
    print(f"precision: {format_percent(metrics.precision)}")
    print(f"recall:    {format_percent(metrics.recall)}")
    print(f"f1:        {format_percent(metrics.f1)}")

    os.makedirs(out_dir, exist_ok=True)
    report_path = os.path.join(out_dir, "report.json")
    with open(report_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(
            {"metrics": metrics.as_dict(), "model_config": header.get("config", {})},
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")

    from .plots import save_confusion_matrix

    figure = os.path.join(out_dir, "confusion_matrix.png")
    save_confusion_matrix(metrics, figure)
    write_manifest(
        os.path.join(out_dir, "evaluate.json"),
        command="evaluate",
        settings={"batch_size": args.batch_size},
        outputs=[report_path, figure],
    )
    return 0


def cmd_predict(args) -> int:
    vocab_dir = args.vocab_dir or os.path.dirname(os.path.abspath(args.checkpoint))
    value_vocab, path_vocab = _load_vocabs(vocab_dir)
    digest = vocab_digest(value_vocab, path_vocab)
    params, _, _ = load_checkpoint(args.checkpoint, expected_digest=digest)
    if args.source == "-":
        source = sys.stdin.read()
    else:
        with open(args.source, encoding="utf-8") as fh:
            source = fh.read()
    results = score_source(
        source, params, value_vocab, path_vocab, _limits(args), seed=args.seed
    )
    if not results:
        print("no function definitions found", file=sys.stderr)
        return 0
    scored = 0
    for outcome, reason in results:
        if outcome is None:
            print(f"skipped {reason}", file=sys.stderr)
        else:
            print(f"{outcome.label}\t{outcome.q_vuln:.6f}")
            scored += 1
    if scored == 0:
        raise Unscorable(f"none of {len(results)} function(s) could be scored")
    return 0


def cmd_synth(args) -> int:
    from .synth import write_synthetic_splits
    from .corpus import load_split

    os.makedirs(args.out, exist_ok=True)
    paths = write_synthetic_splits(args.out, args.count, seed=args.seed)
    for name, path in paths.items():
        vuln, safe = corpus_stats(load_split(path, name))
        print(f"{name}: {vuln + safe} functions ({vuln} vuln, {safe} safe) -> {path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level.upper()),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except ValueError as exc:
        # invalid flag values (bad dropout, non-positive limits, ...)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (PathVulnError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:  # pragma: no cover - defensive
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
