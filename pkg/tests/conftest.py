"""Shared fixtures: a small labeled debate corpus with full annotations.

Two training documents and two test documents, hand-annotated in CoNLL-U,
with a 6-dimensional embedding file whose vocabulary covers the corpus and
three fixture topics.  Positive sentences carry numeric or comparative
claims; negatives are greetings and opinions.
"""

from __future__ import annotations

from pathlib import Path

import pytest

from checkworthy.annotation import align_annotations, parse_conllu
from checkworthy.corpus import build_corpus, load_transcript
from checkworthy.embedding import load_embeddings_text
from checkworthy.evaluation import PipelineResources
from checkworthy.features import FeatureContext, default_word_list
from checkworthy.ranker import TrainConfig
from checkworthy.topics import build_topic_vectors, load_topics

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def train_corpus():
    docs = [
        load_transcript(FIXTURES / "train_alpha.tsv"),
        load_transcript(FIXTURES / "train_beta.tsv"),
    ]
    return build_corpus(docs, split="train")


@pytest.fixture(scope="session")
def test_corpus():
    docs = [
        load_transcript(FIXTURES / "test_one.tsv"),
        load_transcript(FIXTURES / "test_two.tsv"),
    ]
    return build_corpus(docs, split="test")


def _index_for(corpus, *names):
    sentences = []
    for name in names:
        sentences.extend(parse_conllu((FIXTURES / name).read_text(encoding="utf-8")))
    return align_annotations(sentences, corpus)


@pytest.fixture(scope="session")
def train_index(train_corpus):
    return _index_for(train_corpus, "train_alpha.conllu", "train_beta.conllu")


@pytest.fixture(scope="session")
def test_index(test_corpus):
    return _index_for(test_corpus, "test_one.conllu", "test_two.conllu")


@pytest.fixture(scope="session")
def store():
    return load_embeddings_text(FIXTURES / "embeddings.txt")


@pytest.fixture(scope="session")
def topic_set(store):
    return build_topic_vectors(load_topics(FIXTURES / "topics.txt"), store)


@pytest.fixture(scope="session")
def label_scores(train_corpus, test_corpus):
    scores = {}
    for corpus in (train_corpus, test_corpus):
        for record in corpus.records():
            scores[record.key] = float(record.label)
    return scores


@pytest.fixture(scope="session")
def context(store, topic_set, label_scores):
    return FeatureContext(
        store=store,
        topic_set=topic_set,
        word_list=default_word_list(),
        score_map=label_scores,
        we_policy="all_words",
    )


@pytest.fixture(scope="session")
def resources(train_index, test_index, context):
    return PipelineResources(
        train_index=train_index,
        test_index=test_index,
        context=context,
        train_config=TrainConfig(lam=0.01),
    )
