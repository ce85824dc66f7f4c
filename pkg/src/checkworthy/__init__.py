"""Toolkit for ranking transcript sentences by check-worthiness.

Ingests CLEF-style transcript files, extracts hybrid features (an external
transformer score plus word-embedding, topic-similarity, and linguistic
feature groups), trains an L2-regularized logistic regression, and evaluates
rankings with MAP / R-Precision / P@k, including leave-one-out and
use-only-one feature ablations.
"""

__version__ = "0.1.0"

from checkworthy.corpus import (
    ClaimRecord,
    Corpus,
    CorpusStats,
    Document,
    attach_gold_labels,
    corpus_stats,
    load_transcript,
    parse_transcript_tsv,
)
from checkworthy.annotation import (
    AnnotatedSentence,
    Token,
    align_annotations,
    parse_conllu,
)
from checkworthy.embedding import EmbeddingStore, cosine, load_embeddings_text, sentence_vector
from checkworthy.topics import TopicDef, TopicSet, build_topic_vectors, topic_similarities
from checkworthy.features import (
    FeatureContext,
    FeatureGroup,
    FeatureMatrix,
    Standardizer,
    assemble_features,
    extract_group,
    standardize,
)
from checkworthy.ranker import LRModel, TrainConfig, predict_score, rank_document, train_lr
from checkworthy.evaluation import (
    EvalReport,
    RankedDoc,
    average_precision,
    evaluate_corpus,
    precision_metrics,
    qualitative_report,
    run_ablation,
)
from checkworthy.scores import fetch_scores_http, load_scores_tsv, save_scores_tsv

__all__ = [
    "AnnotatedSentence",
    "ClaimRecord",
    "Corpus",
    "CorpusStats",
    "Document",
    "EmbeddingStore",
    "EvalReport",
    "FeatureContext",
    "FeatureGroup",
    "FeatureMatrix",
    "LRModel",
    "RankedDoc",
    "Standardizer",
    "Token",
    "TopicDef",
    "TopicSet",
    "TrainConfig",
    "align_annotations",
    "assemble_features",
    "attach_gold_labels",
    "average_precision",
    "build_topic_vectors",
    "corpus_stats",
    "cosine",
    "evaluate_corpus",
    "extract_group",
    "fetch_scores_http",
    "load_embeddings_text",
    "load_scores_tsv",
    "load_transcript",
    "parse_conllu",
    "parse_transcript_tsv",
    "precision_metrics",
    "predict_score",
    "qualitative_report",
    "rank_document",
    "run_ablation",
    "save_scores_tsv",
    "sentence_vector",
    "standardize",
    "topic_similarities",
    "train_lr",
]
