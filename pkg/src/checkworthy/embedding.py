"""Pretrained word-vector loading, sentence vectors, and cosine similarity.

The loader reads the plain-text format ``vocab_size dim`` header followed by
one ``word v1 ... v_dim`` line per word.  Binary formats are deliberately
unsupported; convert offline (e.g. with gensim) to keep the loader simple
and auditable.  Vectors are stored as float32 to bound memory; all
similarity math is done in float64.
"""

from __future__ import annotations

from pathlib import Path
from typing import Collection, Iterable, Sequence

import numpy as np

from checkworthy.annotation import Token


class EmbeddingLoadError(ValueError):
    """An embedding file line could not be parsed."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmbeddingStore:
    """Read-only word -> vector map.

    Lookup tries the word as stored first and falls back to its lowercased
    form: transcripts capitalize sentence-initial words while reference
    vocabularies are case-sensitive, and without the fallback coverage drops
    sharply.
    """

    def __init__(self, dim: int, vectors: dict[str, np.ndarray]):
        if dim <= 0:
            raise ValueError(f"dim must be positive, got {dim}")
        for word, vec in vectors.items():
            if vec.shape != (dim,):
                raise ValueError(f"vector for {word!r} has shape {vec.shape}, expected ({dim},)")
            vec.setflags(write=False)
        self._dim = dim
        self._vectors = vectors

    @property
    def dim(self) -> int:
        return self._dim

    def lookup(self, word: str) -> np.ndarray | None:
        vec = self._vectors.get(word)
        if vec is None:
            vec = self._vectors.get(word.lower())
        return vec

    def __contains__(self, word: str) -> bool:
        return word in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)


def load_vocab_restriction(path: str | Path) -> frozenset[str]:
    """Read a vocabulary-restriction file, one word per line.

    Lowercase variants are added automatically so the store's lowercase
    fallback keeps working under restriction.
    """
    words = set()
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        word = raw.strip()
        if word:
            words.add(word)
    return restriction_for(words)


def restriction_for(words: Iterable[str]) -> frozenset[str]:
    """Restriction set covering both lookup attempts for each word."""
    out = set()
    for word in words:
        out.add(word)
        out.add(word.lower())
    return frozenset(out)


def load_embeddings_text(
    path: str | Path, restrict: Collection[str] | None = None
) -> EmbeddingStore:
    """Load text-format embeddings, optionally keeping only ``restrict`` words.

    Without a restriction the store holds exactly the header's vocab_size
    entries and duplicate words are an error; with a restriction, skipped
    words are not tracked, so duplicates are only detected among kept words.
    """
    restrict_set = frozenset(restrict) if restrict is not None else None
    vectors: dict[str, np.ndarray] = {}
    vocab_size = -1
    dim = -1
    entries = 0
    with open(path, "r", encoding="utf-8") as handle:
        for line_number, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if line_number == 1:
                parts = line.split()
                if len(parts) != 2:
                    raise EmbeddingLoadError(1, f"header must be 'vocab_size dim', got {line!r}")
                try:
                    vocab_size, dim = int(parts[0]), int(parts[1])
                except ValueError:
                    raise EmbeddingLoadError(1, f"non-integer header {line!r}") from None
                if vocab_size < 0 or dim <= 0:
                    raise EmbeddingLoadError(1, f"invalid header values {line!r}")
                continue
            if not line.strip():
                if entries == vocab_size:
                    continue  # trailing blank line
                raise EmbeddingLoadError(line_number, "unexpected empty line")
            if entries >= vocab_size:
                raise EmbeddingLoadError(
                    line_number, f"more than the declared {vocab_size} vectors"
                )
            parts = line.split()
            word = parts[0]
            if len(parts) - 1 != dim:
                raise EmbeddingLoadError(
                    line_number, f"expected {dim} components for {word!r}, got {len(parts) - 1}"
                )
            entries += 1
            if restrict_set is not None and word not in restrict_set:
                continue
            if word in vectors:
                raise EmbeddingLoadError(line_number, f"duplicate word {word!r}")
            try:
                vec = np.array(parts[1:], dtype=np.float32)
            except ValueError:
                raise EmbeddingLoadError(
                    line_number, f"non-numeric component for {word!r}"
                ) from None
            if not np.all(np.isfinite(vec)):
                raise EmbeddingLoadError(line_number, f"non-finite component for {word!r}")
            vectors[word] = vec
    if vocab_size < 0:
        raise EmbeddingLoadError(1, "empty file")
    if entries != vocab_size:
        raise EmbeddingLoadError(
            0, f"header declares {vocab_size} vectors but file has {entries}"
        )
    return EmbeddingStore(dim, vectors)


def sentence_vector(
    tokens: Sequence[Token], store: EmbeddingStore, policy: str = "all_words"
) -> np.ndarray:
    """Mean embedding of in-vocabulary token surfaces, as float64.

    ``policy`` is ``all_words`` or ``content_words``; the latter drops
    stopword tokens before averaging.  With no in-vocabulary token the zero
    vector is returned.
    """
    if policy not in ("all_words", "content_words"):
        raise ValueError(f"unknown policy {policy!r}")
    hits = []
    for tok in tokens:
        if policy == "content_words" and tok.is_stopword:
            continue
        vec = store.lookup(tok.surface)
        if vec is not None:
            hits.append(vec)
    if not hits:
        return np.zeros(store.dim, dtype=np.float64)
    return np.mean(np.asarray(hits, dtype=np.float64), axis=0)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity in [-1, 1]; zero-norm input yields 0.0 by convention."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    # clamp tiny float excursions outside [-1, 1]
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))
