"""Score sentences with a fine-tuned artifact and emit score TSVs.

Scores are the positive-class column of the softmax, always in [0, 1].
Sentences are scored one at a time so the numbers do not depend on how
callers batch their requests; the HTTP server and the file emitter
therefore produce bitwise-identical scores for the same artifact.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import torch

from bert_scorer.data import Sentence, read_corpus


class ScoringError(ValueError):
    """The artifact or scoring input is unusable."""


@dataclass
class ScorerArtifact:
    """A loaded tokenizer/model pair ready for inference."""

    tokenizer: object
    model: object
    max_seq_len: int


def load_artifact(artifact_dir: str | Path) -> ScorerArtifact:
    """Load a directory produced by finetune()."""
    from transformers import AutoModelForSequenceClassification, AutoTokenizer

    path = Path(artifact_dir)
    if not path.is_dir():
        raise ScoringError(f"{path}: not an artifact directory")
    try:
        tokenizer = AutoTokenizer.from_pretrained(str(path))
        model = AutoModelForSequenceClassification.from_pretrained(str(path))
    except (OSError, ValueError) as exc:
        raise ScoringError(f"{path}: cannot load artifact: {exc}") from None
    model.eval()
    return ScorerArtifact(
        tokenizer=tokenizer,
        model=model,
        max_seq_len=int(tokenizer.model_max_length),
    )


def score_texts(artifact: ScorerArtifact, texts: Sequence[str]) -> list[float]:
    """Positive-class probability per text, independent of request batching."""
    scores: list[float] = []
    with torch.no_grad():
        for text in texts:
            encoded = artifact.tokenizer(
                text,
                truncation=True,
                max_length=artifact.max_seq_len,
                return_tensors="pt",
            )
            logits = artifact.model(**encoded).logits
            scores.append(float(torch.softmax(logits, dim=-1)[0, 1].item()))
    return scores


def score_sentences(
    artifact: ScorerArtifact, sentences: Sequence[Sentence]
) -> dict[tuple[str, int], float]:
    keys = [s.key for s in sentences]
    if len(set(keys)) != len(keys):
        raise ScoringError("duplicate (doc_id, line_no) keys in scoring input")
    return dict(zip(keys, score_texts(artifact, [s.text for s in sentences])))


def scores_to_tsv(scores: dict[tuple[str, int], float]) -> str:
    lines = [
        f"{doc_id}\t{line_no}\t{score!r}"
        for (doc_id, line_no), score in sorted(scores.items())
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def emit_scores(
    artifact_dir: str | Path,
    data_paths: Sequence[str | Path],
    out_path: str | Path,
) -> dict[tuple[str, int], float]:
    """Score every sentence in the inputs and write the score TSV."""
    artifact = load_artifact(artifact_dir)
    scores = score_sentences(artifact, read_corpus(data_paths))
    Path(out_path).write_text(scores_to_tsv(scores), encoding="utf-8")
    return scores
