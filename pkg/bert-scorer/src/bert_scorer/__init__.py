"""Transformer fine-tuning sidecar for check-worthiness scoring.

Fine-tunes a pretrained sentence classifier on labeled transcript TSVs
and exposes the resulting per-sentence probabilities either as a score
TSV or over HTTP (POST /score).
"""

from bert_scorer.config import ConfigError, FineTuneConfig
from bert_scorer.data import DataError, Sentence, read_corpus, read_transcript, require_labels
from bert_scorer.scoring import (
    ScorerArtifact,
    ScoringError,
    emit_scores,
    load_artifact,
    score_sentences,
    score_texts,
)
from bert_scorer.server import make_server, serve
from bert_scorer.training import TrainingLog, finetune, load_training_log

__all__ = [
    "ConfigError",
    "DataError",
    "FineTuneConfig",
    "ScorerArtifact",
    "ScoringError",
    "Sentence",
    "TrainingLog",
    "emit_scores",
    "finetune",
    "load_artifact",
    "load_training_log",
    "make_server",
    "read_corpus",
    "read_transcript",
    "require_labels",
    "score_sentences",
    "score_texts",
    "serve",
]
