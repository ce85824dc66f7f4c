"""Fine-tune a sequence classifier on labeled transcripts.

One run reads labeled transcript TSVs, fine-tunes the base model with a
one-cycle learning-rate schedule, and leaves behind a self-contained
artifact directory: model weights, tokenizer, and ``training_log.tsv``
with the per-step loss curve.  Everything random is driven by the config
seed, so a repeated run tokenizes and batches identically.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import torch

from bert_scorer.config import FineTuneConfig
from bert_scorer.data import DataError, Sentence, read_corpus, require_labels

logger = logging.getLogger(__name__)

LOG_NAME = "training_log.tsv"


@dataclass(frozen=True)
class TrainingLog:
    """Loss curve of one run: (epoch, step, loss) per optimizer step."""

    steps: tuple[tuple[int, int, float], ...]

    def epoch_means(self) -> list[float]:
        means: list[float] = []
        epoch = 1
        while True:
            losses = [loss for e, _, loss in self.steps if e == epoch]
            if not losses:
                return means
            means.append(sum(losses) / len(losses))
            epoch += 1

    def to_tsv(self) -> str:
        lines = ["epoch\tstep\tloss"]
        lines.extend(f"{e}\t{s}\t{loss!r}" for e, s, loss in self.steps)
        return "\n".join(lines) + "\n"


def load_training_log(path: str | Path) -> TrainingLog:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "epoch\tstep\tloss":
        raise ValueError(f"{path}: not a training log")
    steps = []
    for line in lines[1:]:
        epoch, step, loss = line.split("\t")
        steps.append((int(epoch), int(step), float(loss)))
    return TrainingLog(tuple(steps))


def encode_sentences(tokenizer, sentences: Sequence[Sentence], max_seq_len: int):
    """Tokenize every sentence once; padding happens per batch later."""
    return tokenizer(
        [s.text for s in sentences],
        truncation=True,
        max_length=max_seq_len,
    )


def finetune(
    train_paths: Sequence[str | Path],
    cfg: FineTuneConfig,
    output_dir: str | Path,
) -> TrainingLog:
    """Train on the labeled transcripts and save the artifact directory."""
    from transformers import AutoModelForSequenceClassification, AutoTokenizer

    sentences = read_corpus(train_paths)
    labels = require_labels(sentences)

    torch.manual_seed(cfg.seed)
    tokenizer = AutoTokenizer.from_pretrained(cfg.base_model)
    tokenizer.model_max_length = cfg.max_seq_len
    model = AutoModelForSequenceClassification.from_pretrained(
        cfg.base_model, num_labels=2
    )
    model.train()

    encodings = encode_sentences(tokenizer, sentences, cfg.max_seq_len)
    features = [
        {key: encodings[key][i] for key in encodings}
        for i in range(len(sentences))
    ]
    targets = torch.tensor(labels, dtype=torch.long)

    n = len(sentences)
    steps_per_epoch = math.ceil(n / cfg.batch_size)
    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.max_lr)
    scheduler = torch.optim.lr_scheduler.OneCycleLR(
        optimizer, max_lr=cfg.max_lr, total_steps=cfg.epochs * steps_per_epoch
    )
    shuffler = torch.Generator().manual_seed(cfg.seed)

    steps: list[tuple[int, int, float]] = []
    for epoch in range(1, cfg.epochs + 1):
        order = torch.randperm(n, generator=shuffler).tolist()
        for step, start in enumerate(range(0, n, cfg.batch_size), 1):
            chosen = order[start : start + cfg.batch_size]
            batch = tokenizer.pad([features[i] for i in chosen], return_tensors="pt")
            batch["labels"] = targets[chosen]
            loss = model(**batch).loss
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            scheduler.step()
            steps.append((epoch, step, float(loss.item())))
        epoch_losses = [loss for e, _, loss in steps if e == epoch]
        logger.info(
            "epoch %d/%d: mean loss %.4f over %d steps",
            epoch, cfg.epochs, sum(epoch_losses) / len(epoch_losses), len(epoch_losses),
        )

    log = TrainingLog(tuple(steps))
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    (out / LOG_NAME).write_text(log.to_tsv(), encoding="utf-8")
    return log


__all__ = [
    "LOG_NAME",
    "TrainingLog",
    "DataError",
    "encode_sentences",
    "finetune",
    "load_training_log",
]
