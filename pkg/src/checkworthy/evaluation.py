"""Ranking metrics, macro-averaged evaluation, and the feature ablation grid.

Metrics follow the shared-task protocol: every metric is computed per
document over the full ranking depth, then macro-averaged with equal
weight per document.

    AP   = (1/R) * sum over positive ranks k of precision@k
    RP   = precision@R, R = number of positives in the document
    P@k  = positives among the top k, divided by k even when the
           document has fewer than k sentences

A document with no positive sentence is an error, never a silent zero:
the real test files all contain positives, so a zero-positive document
signals broken input and would quietly drag every macro-average down.

The ablation runner repeats the whole train/standardize/fit/rank cycle
once per feature subset, either dropping one group at a time from the
full set (leave_one_out) or keeping exactly one (use_only_one).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from checkworthy.annotation import AnnotationIndex
from checkworthy.corpus import Corpus
from checkworthy.features import (
    CANONICAL_ORDER,
    FeatureContext,
    FeatureGroup,
    FeatureMatrix,
    assemble_features,
    standardize,
)
from checkworthy.ranker import LRModel, TrainConfig, predict_scores, train_lr

logger = logging.getLogger(__name__)

ABLATION_MODES = ("leave_one_out", "use_only_one")

# Table row order: CS, BERT, VT, HW, WE, CT, POS
_ABLATION_GROUP_ORDER = (
    FeatureGroup.CS,
    FeatureGroup.BERT,
    FeatureGroup.VT,
    FeatureGroup.HW,
    FeatureGroup.WE,
    FeatureGroup.CT,
    FeatureGroup.POS,
)


class EvaluationError(ValueError):
    """Evaluation input violated the metric preconditions."""


@dataclass(frozen=True)
class RankedDoc:
    """One document's ranking: (line_no, score, label) in rank order."""

    doc_id: str
    entries: tuple[tuple[int, float, int], ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise EvaluationError(f"document {self.doc_id!r} has an empty ranking")
        for line_no, score, label in self.entries:
            if label not in (0, 1):
                raise EvaluationError(
                    f"document {self.doc_id!r} line {line_no}: label must be 0 or 1"
                )
        for (line_a, score_a, _), (line_b, score_b, _) in zip(self.entries, self.entries[1:]):
            if score_a < score_b or (score_a == score_b and line_a >= line_b):
                raise EvaluationError(
                    f"document {self.doc_id!r}: entries not in rank order near line {line_b}"
                )

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(label for _, _, label in self.entries)


@dataclass(frozen=True)
class DocMetrics:
    doc_id: str
    ap: float
    rp: float
    p_at_5: float
    p_at_10: float


@dataclass(frozen=True)
class EvalReport:
    """Per-document metrics (sorted by doc_id) and their unweighted means."""

    docs: tuple[DocMetrics, ...]
    map_score: float
    mean_rp: float
    mean_p5: float
    mean_p10: float

    @property
    def doc_count(self) -> int:
        return len(self.docs)


def average_precision(ranked_labels: Sequence[int]) -> float:
    """Full-depth AP of a binary list in rank order; zero positives is an error."""
    total_positives = sum(1 for label in ranked_labels if label == 1)
    if total_positives == 0:
        raise EvaluationError("average precision undefined: no positive labels")
    hits = 0
    ap = 0.0
    for rank, label in enumerate(ranked_labels, 1):
        if label == 1:
            hits += 1
            ap += hits / rank
    return ap / total_positives


def precision_metrics(ranked_labels: Sequence[int]) -> dict[str, float]:
    """RP, P@5, and P@10 of a binary list in rank order.

    Lists shorter than k still divide by k; a list with no positives gets
    RP = 0.0 (callers that require positives check before calling).
    """
    if not ranked_labels:
        raise EvaluationError("precision metrics undefined on an empty ranking")
    r = sum(1 for label in ranked_labels if label == 1)
    rp = sum(ranked_labels[:r]) / r if r > 0 else 0.0
    return {
        "RP": rp,
        "P@5": sum(ranked_labels[:5]) / 5,
        "P@10": sum(ranked_labels[:10]) / 10,
    }


def evaluate_corpus(ranked_docs: Sequence[RankedDoc]) -> EvalReport:
    """Per-document metrics and their macro-averages, documents equally weighted."""
    if not ranked_docs:
        raise EvaluationError("no documents to evaluate")
    zero_positive = sorted(
        doc.doc_id for doc in ranked_docs if not any(label == 1 for label in doc.labels)
    )
    if zero_positive:
        raise EvaluationError(
            f"documents without a single positive label: {', '.join(zero_positive)}"
        )
    seen: set[str] = set()
    for doc in ranked_docs:
        if doc.doc_id in seen:
            raise EvaluationError(f"duplicate document {doc.doc_id!r} in evaluation")
        seen.add(doc.doc_id)
    docs = []
    for doc in sorted(ranked_docs, key=lambda d: d.doc_id):
        labels = doc.labels
        precisions = precision_metrics(labels)
        docs.append(
            DocMetrics(
                doc_id=doc.doc_id,
                ap=average_precision(labels),
                rp=precisions["RP"],
                p_at_5=precisions["P@5"],
                p_at_10=precisions["P@10"],
            )
        )
    return EvalReport(
        docs=tuple(docs),
        map_score=float(np.mean([d.ap for d in docs])),
        mean_rp=float(np.mean([d.rp for d in docs])),
        mean_p5=float(np.mean([d.p_at_5 for d in docs])),
        mean_p10=float(np.mean([d.p_at_10 for d in docs])),
    )


def rank_by_score(
    keys: Sequence[tuple[str, int]], scores: Sequence[float]
) -> dict[str, list[tuple[int, float]]]:
    """Group (doc_id, line_no) keys by document and order each for ranking.

    Descending score, ascending line_no on ties; document order follows
    first appearance in ``keys``.
    """
    if len(keys) != len(scores):
        raise EvaluationError(f"{len(keys)} keys but {len(scores)} scores")
    per_doc: dict[str, list[tuple[int, float]]] = {}
    for (doc_id, line_no), score in zip(keys, scores):
        per_doc.setdefault(doc_id, []).append((line_no, float(score)))
    for rows in per_doc.values():
        rows.sort(key=lambda pair: (-pair[1], pair[0]))
    return per_doc


def build_ranked_docs(
    corpus: Corpus, keys: Sequence[tuple[str, int]], scores: Sequence[float]
) -> list[RankedDoc]:
    """Attach gold labels to ranked scores, one RankedDoc per document."""
    if not corpus.is_labeled:
        raise EvaluationError("ranked documents need a labeled corpus")
    label_of = {record.key: record.label for record in corpus.records()}
    missing = [key for key in keys if key not in label_of]
    if missing:
        doc_id, line_no = missing[0]
        raise EvaluationError(
            f"{len(missing)} scored keys missing from the corpus, first {doc_id}:{line_no}"
        )
    ranked = []
    for doc_id, rows in rank_by_score(keys, scores).items():
        entries = tuple(
            (line_no, score, int(label_of[(doc_id, line_no)])) for line_no, score in rows
        )
        ranked.append(RankedDoc(doc_id=doc_id, entries=entries))
    return ranked


@dataclass(frozen=True)
class PipelineResources:
    """Everything a train/evaluate cycle needs besides the two corpora."""

    train_index: AnnotationIndex
    test_index: AnnotationIndex
    context: FeatureContext
    train_config: TrainConfig = TrainConfig()


@dataclass(frozen=True)
class PipelineResult:
    report: EvalReport
    ranked_docs: tuple[RankedDoc, ...]
    model: LRModel


def train_model(
    corpus_train: Corpus,
    resources: PipelineResources,
    enabled: Iterable[FeatureGroup],
) -> LRModel:
    """Assemble, standardize, and fit on the training corpus.

    The returned model carries the training standardizer, so raw feature
    matrices can be scored directly with score_matrix.
    """
    if not corpus_train.is_labeled:
        raise EvaluationError("training requires a labeled corpus")
    matrix = assemble_features(corpus_train, resources.train_index, resources.context, enabled)
    standardized, standardizer = standardize(matrix)
    labels = np.array([record.label for record in corpus_train.records()], dtype=np.float64)
    return train_lr(standardized, labels, resources.train_config, standardizer=standardizer)


def score_matrix(model: LRModel, matrix: FeatureMatrix) -> np.ndarray:
    """Score a raw feature matrix, applying the model's own standardizer."""
    if model.standardizer is not None:
        matrix, _ = standardize(matrix, model.standardizer)
    return predict_scores(model, matrix)


def run_pipeline(
    corpus_train: Corpus,
    corpus_test: Corpus,
    resources: PipelineResources,
    enabled: Iterable[FeatureGroup] = CANONICAL_ORDER,
) -> PipelineResult:
    """One full cycle: train on one corpus, rank and evaluate the other."""
    model = train_model(corpus_train, resources, enabled)
    test_matrix = assemble_features(
        corpus_test, resources.test_index, resources.context, enabled
    )
    scores = score_matrix(model, test_matrix)
    ranked = build_ranked_docs(corpus_test, test_matrix.keys, scores)
    return PipelineResult(
        report=evaluate_corpus(ranked), ranked_docs=tuple(ranked), model=model
    )


@dataclass(frozen=True)
class AblationRow:
    name: str
    enabled: frozenset[FeatureGroup]
    report: EvalReport


def ablation_rows(mode: str) -> list[tuple[str, frozenset[FeatureGroup]]]:
    """Row names and enabled sets for a mode, in table order."""
    everything = frozenset(CANONICAL_ORDER)
    if mode == "leave_one_out":
        rows = [("All", everything)]
        rows.extend(
            (f"All-{group.value}", everything - {group}) for group in _ABLATION_GROUP_ORDER
        )
        return rows
    if mode == "use_only_one":
        return [(group.value, frozenset({group})) for group in _ABLATION_GROUP_ORDER]
    raise EvaluationError(f"unknown ablation mode {mode!r}; expected one of {ABLATION_MODES}")


def run_ablation(
    corpus_train: Corpus,
    corpus_test: Corpus,
    resources: PipelineResources,
    mode: str,
) -> list[AblationRow]:
    """Run the full pipeline once per feature subset of the chosen mode."""
    rows = []
    for name, enabled in ablation_rows(mode):
        result = run_pipeline(corpus_train, corpus_test, resources, enabled)
        rows.append(AblationRow(name=name, enabled=enabled, report=result.report))
    return rows


@dataclass(frozen=True)
class QualitativeEntry:
    doc_id: str
    rank: int
    speaker: str
    text: str


def qualitative_report(
    ranked_docs: Sequence[RankedDoc], corpus: Corpus
) -> list[QualitativeEntry]:
    """The highest-ranked negative sentence per document, with its 1-based rank.

    These are the sentences the ranker pushes up despite a 0 gold label,
    the most informative disagreements to read.  All-positive documents
    are skipped with a logged notice.
    """
    entries = []
    for doc in sorted(ranked_docs, key=lambda d: d.doc_id):
        hit = next(
            (
                (rank, line_no)
                for rank, (line_no, _, label) in enumerate(doc.entries, 1)
                if label == 0
            ),
            None,
        )
        if hit is None:
            logger.warning(
                "document %s has no negative sentences; skipped in qualitative report",
                doc.doc_id,
            )
            continue
        rank, line_no = hit
        record = corpus.document(doc.doc_id).record(line_no)
        entries.append(
            QualitativeEntry(
                doc_id=doc.doc_id, rank=rank, speaker=record.speaker, text=record.text
            )
        )
    return entries


def report_to_tsv(report: EvalReport) -> str:
    """Per-document rows plus a MACRO row, tab-separated."""
    lines = ["doc_id\tAP\tRP\tP@5\tP@10"]
    for doc in report.docs:
        lines.append(
            f"{doc.doc_id}\t{doc.ap:.6f}\t{doc.rp:.6f}\t{doc.p_at_5:.6f}\t{doc.p_at_10:.6f}"
        )
    lines.append(
        f"MACRO\t{report.map_score:.6f}\t{report.mean_rp:.6f}"
        f"\t{report.mean_p5:.6f}\t{report.mean_p10:.6f}"
    )
    return "\n".join(lines) + "\n"


def format_report(report: EvalReport) -> str:
    """Human-readable fixed-width table of the same numbers as report_to_tsv."""
    width = max([len("document")] + [len(d.doc_id) for d in report.docs])
    header = f"{'document':<{width}}      AP      RP     P@5    P@10"
    lines = [header, "-" * len(header)]
    for doc in report.docs:
        lines.append(
            f"{doc.doc_id:<{width}}  {doc.ap:6.4f}  {doc.rp:6.4f}  {doc.p_at_5:6.4f}  {doc.p_at_10:6.4f}"
        )
    lines.append("-" * len(header))
    lines.append(
        f"{'macro':<{width}}  {report.map_score:6.4f}  {report.mean_rp:6.4f}"
        f"  {report.mean_p5:6.4f}  {report.mean_p10:6.4f}"
    )
    return "\n".join(lines)


def ablation_to_tsv(rows: Sequence[AblationRow]) -> str:
    lines = ["feature_set\tMAP\tRP\tP@5\tP@10"]
    for row in rows:
        report = row.report
        lines.append(
            f"{row.name}\t{report.map_score:.6f}\t{report.mean_rp:.6f}"
            f"\t{report.mean_p5:.6f}\t{report.mean_p10:.6f}"
        )
    return "\n".join(lines) + "\n"


def format_ablation(rows: Sequence[AblationRow]) -> str:
    width = max([len("feature set")] + [len(row.name) for row in rows])
    header = f"{'feature set':<{width}}     MAP      RP     P@5    P@10"
    lines = [header, "-" * len(header)]
    for row in rows:
        report = row.report
        lines.append(
            f"{row.name:<{width}}  {report.map_score:6.4f}  {report.mean_rp:6.4f}"
            f"  {report.mean_p5:6.4f}  {report.mean_p10:6.4f}"
        )
    return "\n".join(lines)


def qualitative_to_tsv(entries: Sequence[QualitativeEntry]) -> str:
    lines = ["doc_id\trank\tspeaker\ttext"]
    lines.extend(
        f"{e.doc_id}\t{e.rank}\t{e.speaker}\t{e.text}" for e in entries
    )
    return "\n".join(lines) + "\n"
