"""Controversial-topic centroids and sentence-to-topic similarities.

Each topic is a short list of single-token seed words; its centroid is the
mean embedding of the in-vocabulary seeds.  A sentence is compared to every
topic by cosine between the topic centroid and the sentence's mean content
word embedding (stopwords excluded).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from checkworthy.annotation import Token
from checkworthy.embedding import EmbeddingStore, cosine, sentence_vector


class TopicError(ValueError):
    """Topic definitions are malformed or unusable with the given store."""


@dataclass(frozen=True)
class TopicDef:
    name: str
    seed_words: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.name.strip():
            raise TopicError("topic with empty name")
        if not self.seed_words:
            raise TopicError(f"topic {self.name!r} has no seed words")
        for word in self.seed_words:
            if not word or any(ch.isspace() for ch in word):
                raise TopicError(
                    f"topic {self.name!r}: seed {word!r} must be a single token"
                )


@dataclass(frozen=True)
class TopicSet:
    """Topics in file order with their centroid matrix (n_topics, dim)."""

    topics: tuple[TopicDef, ...]
    centroids: np.ndarray

    def __post_init__(self) -> None:
        if self.centroids.shape[0] != len(self.topics):
            raise TopicError("centroid count does not match topic count")
        self.centroids.setflags(write=False)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.topics)

    def __len__(self) -> int:
        return len(self.topics)


def parse_topics(text: str) -> list[TopicDef]:
    """Parse 'topic_name: word1, word2, ...' lines; '#' starts a comment."""
    topics: list[TopicDef] = []
    seen: set[str] = set()
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, rest = line.partition(":")
        if not sep:
            raise TopicError(f"line {line_number}: expected 'topic_name: word1, word2, ...'")
        name = name.strip()
        seeds = tuple(w.strip() for w in rest.split(",") if w.strip())
        if name in seen:
            raise TopicError(f"line {line_number}: duplicate topic name {name!r}")
        seen.add(name)
        if not seeds:
            raise TopicError(f"line {line_number}: topic {name!r} has no seed words")
        topics.append(TopicDef(name=name, seed_words=seeds))
    if not topics:
        raise TopicError("no topics defined")
    return topics


def load_topics(path: str | Path) -> list[TopicDef]:
    return parse_topics(Path(path).read_text(encoding="utf-8"))


@lru_cache(maxsize=1)
def default_topics() -> tuple[TopicDef, ...]:
    """The bundled 11-topic seed set (reconstruction, see data/topics.txt)."""
    text = resources.files("checkworthy.data").joinpath("topics.txt").read_text("utf-8")
    return tuple(parse_topics(text))


def build_topic_vectors(
    topics: Sequence[TopicDef], store: EmbeddingStore
) -> TopicSet:
    """Compute per-topic centroids as the mean of in-vocabulary seed vectors."""
    centroids = np.zeros((len(topics), store.dim), dtype=np.float64)
    for i, topic in enumerate(topics):
        vecs = [store.lookup(w) for w in topic.seed_words]
        vecs = [v for v in vecs if v is not None]
        if not vecs:
            raise TopicError(
                f"topic {topic.name!r}: none of its seed words are in the embedding vocabulary"
            )
        centroids[i] = np.mean(np.asarray(vecs, dtype=np.float64), axis=0)
    return TopicSet(topics=tuple(topics), centroids=centroids)


def topic_similarities(
    tokens: Sequence[Token], topic_set: TopicSet, store: EmbeddingStore
) -> np.ndarray:
    """Cosine between the sentence's content-word vector and every centroid."""
    if topic_set.centroids.shape[1] != store.dim:
        raise TopicError(
            f"topic centroids have dim {topic_set.centroids.shape[1]}, store has {store.dim}"
        )
    sent = sentence_vector(tokens, store, policy="content_words")
    return np.array([cosine(sent, c) for c in topic_set.centroids], dtype=np.float64)
