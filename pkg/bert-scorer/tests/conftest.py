"""Shared fixtures: a tiny local base checkpoint and a deterministic toy corpus.

The real pretrained base lives on a model hub this test environment cannot
reach, so the suite builds its own miniature checkpoint (a 2-layer, 32-wide
encoder with a word-level WordPiece vocabulary) and a 200-sentence toy
corpus whose two classes use disjoint vocabularies.  That keeps every test
self-contained, fast, and deterministic while still exercising the full
tokenizer/model/artifact round trip.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path

import pytest
import torch
from transformers.utils import logging as hf_logging

from bert_scorer.config import FineTuneConfig
from bert_scorer.training import finetune

hf_logging.set_verbosity_error()
hf_logging.disable_progress_bar()

# statement-like sentences built as subject x verb x amount (5 * 4 * 5 = 100)
CHECKABLE_SUBJECTS = ("taxes", "unemployment", "spending", "crime", "exports")
CHECKABLE_VERBS = ("rose", "fell", "doubled", "dropped")
CHECKABLE_AMOUNTS = ("two percent", "five percent", "nine percent",
                     "forty percent", "nine million")

# chatter built as opener x middle x closer (5 * 4 * 5 = 100), vocabulary
# disjoint from the checkable sentences so a small model can separate them
CHATTER_OPENERS = ("well", "okay", "right", "now", "good")
CHATTER_MIDDLES = ("thank", "welcome", "evening", "please")
CHATTER_CLOSERS = ("folks", "friends", "back", "again", "tonight")

TOY_MAX_LR = 5e-3
TOY_SEED = 7


def checkable_sentences() -> list[str]:
    return [
        f"{subject} {verb} {amount}"
        for subject, verb, amount in itertools.product(
            CHECKABLE_SUBJECTS, CHECKABLE_VERBS, CHECKABLE_AMOUNTS
        )
    ]


def chatter_sentences() -> list[str]:
    return [
        f"{opener} {middle} {closer}"
        for opener, middle, closer in itertools.product(
            CHATTER_OPENERS, CHATTER_MIDDLES, CHATTER_CLOSERS
        )
    ]


def toy_rows() -> list[tuple[str, int]]:
    """All 200 (text, label) rows, classes interleaved."""
    rows: list[tuple[str, int]] = []
    for positive, negative in zip(checkable_sentences(), chatter_sentences()):
        rows.append((positive, 1))
        rows.append((negative, 0))
    return rows


def write_transcript(path: Path, rows: list[tuple[str, int]]) -> None:
    lines = [
        f"{line_no}\tSPEAKER\t{text}\t{label}"
        for line_no, (text, label) in enumerate(rows, 1)
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _vocabulary() -> list[str]:
    words = set()
    for sentence in checkable_sentences() + chatter_sentences():
        words.update(sentence.split())
    return ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + sorted(words)


def build_tiny_base(target: Path) -> None:
    """Save a small randomly initialized checkpoint usable as base_model."""
    from tokenizers import Tokenizer
    from tokenizers.models import WordPiece
    from tokenizers.normalizers import BertNormalizer
    from tokenizers.pre_tokenizers import BertPreTokenizer
    from tokenizers.processors import TemplateProcessing
    from transformers import (
        BertConfig,
        BertForSequenceClassification,
        PreTrainedTokenizerFast,
    )

    vocab = {token: index for index, token in enumerate(_vocabulary())}
    core = Tokenizer(WordPiece(vocab, unk_token="[UNK]"))
    core.normalizer = BertNormalizer(lowercase=True)
    core.pre_tokenizer = BertPreTokenizer()
    core.post_processor = TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])],
    )
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_object=core,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
    )

    torch.manual_seed(1234)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=160,
        num_labels=2,
    )
    model = BertForSequenceClassification(config)

    target.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(target)
    tokenizer.save_pretrained(target)


@dataclass(frozen=True)
class ToyCorpus:
    train_path: Path
    heldout_path: Path
    heldout_labels: dict[tuple[str, int], int]


@pytest.fixture(scope="session")
def toyset() -> list:
    return toy_rows()


@pytest.fixture(scope="session")
def write_tsv():
    return write_transcript


@pytest.fixture(scope="session")
def tiny_base(tmp_path_factory) -> str:
    target = tmp_path_factory.mktemp("base") / "tiny-base"
    build_tiny_base(target)
    return str(target)


@pytest.fixture(scope="session")
def toy_corpus(tmp_path_factory) -> ToyCorpus:
    root = tmp_path_factory.mktemp("toy")
    rows = toy_rows()
    train, heldout = rows[:140], rows[140:]
    train_path = root / "toy_train.tsv"
    heldout_path = root / "toy_heldout.tsv"
    write_transcript(train_path, train)
    write_transcript(heldout_path, heldout)
    labels = {
        ("toy_heldout", line_no): label
        for line_no, (_, label) in enumerate(heldout, 1)
    }
    return ToyCorpus(train_path, heldout_path, labels)


@pytest.fixture(scope="session")
def toy_config(tiny_base) -> FineTuneConfig:
    return FineTuneConfig(base_model=tiny_base, max_lr=TOY_MAX_LR, seed=TOY_SEED)


@pytest.fixture(scope="session")
def trained_artifact(tmp_path_factory, toy_corpus, toy_config) -> str:
    """One shared fine-tuned artifact for scoring and wire tests."""
    target = tmp_path_factory.mktemp("artifact") / "model"
    finetune([toy_corpus.train_path], toy_config, target)
    return str(target)
