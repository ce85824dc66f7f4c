"""Command-line entry point: finetune, emit, serve."""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Sequence

from bert_scorer.config import ConfigError, FineTuneConfig
from bert_scorer.data import DataError
from bert_scorer.scoring import ScoringError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bert-scorer",
        description="Fine-tune a transformer sentence classifier and emit "
        "or serve check-worthiness scores.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    defaults = FineTuneConfig()
    finetune = sub.add_parser("finetune", help="fine-tune on labeled transcript TSVs")
    finetune.add_argument("--train", nargs="+", required=True, metavar="PATH",
                          help="labeled transcript TSV files or directories")
    finetune.add_argument("--out", required=True, metavar="DIR",
                          help="directory for the model artifact and training log")
    finetune.add_argument("--base-model", default=defaults.base_model)
    finetune.add_argument("--max-lr", type=float, default=defaults.max_lr)
    finetune.add_argument("--epochs", type=int, default=defaults.epochs)
    finetune.add_argument("--batch-size", type=int, default=defaults.batch_size)
    finetune.add_argument("--max-seq-len", type=int, default=defaults.max_seq_len)
    finetune.add_argument("--seed", type=int, default=defaults.seed)

    emit = sub.add_parser("emit", help="score transcript TSVs into a score TSV")
    emit.add_argument("--model", required=True, metavar="DIR",
                      help="artifact directory written by finetune")
    emit.add_argument("--data", nargs="+", required=True, metavar="PATH",
                      help="transcript TSV files or directories to score")
    emit.add_argument("--out", required=True, metavar="FILE",
                      help="output score TSV path")

    serve = sub.add_parser("serve", help="serve POST /score over an artifact")
    serve.add_argument("--model", required=True, metavar="DIR")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8080)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "finetune":
            from bert_scorer.training import finetune

            cfg = FineTuneConfig(
                base_model=args.base_model,
                max_lr=args.max_lr,
                epochs=args.epochs,
                batch_size=args.batch_size,
                max_seq_len=args.max_seq_len,
                seed=args.seed,
            )
            finetune(args.train, cfg, args.out)
        elif args.command == "emit":
            from bert_scorer.scoring import emit_scores

            scores = emit_scores(args.model, args.data, args.out)
            print(f"wrote {len(scores)} scores to {args.out}")
        else:
            from bert_scorer.server import serve

            serve(args.model, host=args.host, port=args.port)
    except (ConfigError, DataError, ScoringError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entrypoint() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    entrypoint()
