"""Per-sentence feature groups, feature-matrix assembly, and standardization.

Seven groups in canonical order, each toggled atomically during ablation:

====== ===== =========================================================
group  width semantics
====== ===== =========================================================
BERT   1     externally supplied transformer probability in [0, 1]
WE     dim   mean word embedding of the sentence (all words by default)
CT     |T|   cosine similarity to each controversial-topic centroid
CS     4     counts of JJR, JJS, RBR, RBS tags, one dimension each
HW     1     1.0 when any token lemma is on the handcrafted word list
VT     3     binary past / present / future flags from the verb tenses
POS    4     counts of NOUN, VERB, ADV, ADJ coarse tags
====== ===== =========================================================

Verb tense is decided by a layered rule.  Future constructions are found
first: a ``will``/``shall`` modal followed by a base verb, or periphrastic
"be going to" plus a base verb; their tokens (including the attached "be"
auxiliary) are excluded from the past/present scan, so "We're going to put
our auto industry back to work" flags future only.  A remaining token is
past when it is tagged VBD, carries ``Tense=Past`` while finite, or is a
finite VBN; present when tagged VBZ/VBP or carrying ``Tense=Pres`` while
finite.  A token is treated as finite unless its morphology says otherwise
(``VerbForm`` of Inf/Part/Ger/...); modals never count as past or present.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from checkworthy.annotation import AnnotatedSentence, AnnotationIndex, Token
from checkworthy.corpus import Corpus
from checkworthy.embedding import EmbeddingStore, sentence_vector
from checkworthy.topics import TopicSet, topic_similarities


class FeatureError(ValueError):
    """Feature extraction failed or was misconfigured."""


class FeatureGroup(Enum):
    """The seven feature groups, in canonical layout order."""

    BERT = "BERT"
    WE = "WE"
    CT = "CT"
    CS = "CS"
    HW = "HW"
    VT = "VT"
    POS = "POS"


CANONICAL_ORDER: tuple[FeatureGroup, ...] = tuple(FeatureGroup)

CS_TAGS: tuple[str, ...] = ("JJR", "JJS", "RBR", "RBS")
POS_TAGS: tuple[str, ...] = ("NOUN", "VERB", "ADV", "ADJ")

_NONFINITE_VERBFORMS = frozenset({"Inf", "Part", "Ger", "Conv", "Sup", "Vnoun"})
_FUTURE_MODAL_LEMMAS = frozenset({"will", "shall"})


@dataclass(frozen=True)
class FeatureContext:
    """Resources needed by the enabled feature groups.

    ``we_policy`` controls whether the WE group averages all words or only
    content words; the topic-similarity group always uses content words.
    """

    store: EmbeddingStore | None = None
    topic_set: TopicSet | None = None
    word_list: frozenset[str] | None = None
    score_map: Mapping[tuple[str, int], float] | None = None
    we_policy: str = "all_words"


@dataclass(frozen=True)
class GroupSegment:
    group: FeatureGroup
    offset: int
    width: int


@dataclass(frozen=True)
class FeatureVector:
    key: tuple[str, int]
    values: np.ndarray
    layout: tuple[GroupSegment, ...]


@dataclass(frozen=True)
class FeatureMatrix:
    """Row-per-record feature values with named group segments."""

    keys: tuple[tuple[str, int], ...]
    values: np.ndarray
    layout: tuple[GroupSegment, ...]

    def __post_init__(self) -> None:
        if self.values.ndim != 2:
            raise FeatureError(f"values must be 2-D, got shape {self.values.shape}")
        if len(self.keys) != self.values.shape[0]:
            raise FeatureError(
                f"{len(self.keys)} keys but {self.values.shape[0]} rows"
            )
        expected = 0
        for seg in self.layout:
            if seg.offset != expected:
                raise FeatureError(f"segment {seg.group.value} at offset {seg.offset}, expected {expected}")
            expected += seg.width
        if expected != self.values.shape[1]:
            raise FeatureError(
                f"layout covers {expected} dims but rows have {self.values.shape[1]}"
            )
        self.values.setflags(write=False)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def groups(self) -> tuple[FeatureGroup, ...]:
        return tuple(seg.group for seg in self.layout)

    def segment(self, group: FeatureGroup) -> GroupSegment:
        for seg in self.layout:
            if seg.group is group:
                return seg
        raise KeyError(group)

    def project(self, group: FeatureGroup) -> np.ndarray:
        """The columns belonging to one group, as a copy."""
        seg = self.segment(group)
        return self.values[:, seg.offset : seg.offset + seg.width].copy()

    def row(self, index: int) -> FeatureVector:
        return FeatureVector(self.keys[index], self.values[index].copy(), self.layout)

    def __len__(self) -> int:
        return len(self.keys)


def load_word_list(path: str | Path) -> frozenset[str]:
    """Read a handcrafted word list, one lowercase lemma per line."""
    words = set()
    for line_number, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        word = raw.strip()
        if not word:
            continue
        if word != word.lower() or any(ch.isspace() for ch in word):
            raise FeatureError(
                f"word list line {line_number}: {word!r} must be a single lowercase lemma"
            )
        words.add(word)
    if not words:
        raise FeatureError("word list is empty")
    return frozenset(words)


@lru_cache(maxsize=1)
def default_word_list() -> frozenset[str]:
    """The bundled lemma list (a reconstruction; see data/handcrafted_words.txt)."""
    text = resources.files("checkworthy.data").joinpath("handcrafted_words.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def group_width(group: FeatureGroup, ctx: FeatureContext) -> int:
    if group is FeatureGroup.BERT:
        return 1
    if group is FeatureGroup.WE:
        if ctx.store is None:
            raise FeatureError("WE group requires an embedding store")
        return ctx.store.dim
    if group is FeatureGroup.CT:
        if ctx.topic_set is None:
            raise FeatureError("CT group requires a topic set")
        return len(ctx.topic_set)
    if group is FeatureGroup.CS:
        return len(CS_TAGS)
    if group is FeatureGroup.HW:
        return 1
    if group is FeatureGroup.VT:
        return 3
    if group is FeatureGroup.POS:
        return len(POS_TAGS)
    raise FeatureError(f"unknown group {group!r}")


def _is_finite(tok: Token) -> bool:
    return tok.morph.get("VerbForm") not in _NONFINITE_VERBFORMS


def _future_construction_tokens(tokens: Sequence[Token]) -> set[int]:
    """Indices participating in a future construction (empty set when none)."""
    consumed: set[int] = set()
    n = len(tokens)
    for i, tok in enumerate(tokens):
        if tok.xpos == "MD" and tok.lemma.lower() in _FUTURE_MODAL_LEMMAS:
            if any(t.xpos == "VB" for t in tokens[i + 1 :]):
                consumed.add(i)
        elif tok.xpos == "VBG" and tok.lemma.lower() == "go":
            to_index = next(
                (j for j in range(i + 1, min(i + 4, n)) if tokens[j].lemma.lower() == "to"),
                None,
            )
            if to_index is None:
                continue
            if any(t.xpos == "VB" for t in tokens[to_index + 1 : to_index + 4]):
                consumed.add(i)
                for j in range(max(0, i - 3), i):
                    if tokens[j].lemma.lower() == "be":
                        consumed.add(j)
    return consumed


def verb_tense_flags(tokens: Sequence[Token]) -> np.ndarray:
    """(past, present, future) binary flags; see the module docstring."""
    consumed = _future_construction_tokens(tokens)
    future = bool(consumed)
    past = False
    present = False
    for i, tok in enumerate(tokens):
        if i in consumed or tok.xpos == "MD":
            continue
        finite = _is_finite(tok)
        verbform = tok.morph.get("VerbForm")
        tense = tok.morph.get("Tense")
        if tok.xpos == "VBD" or (finite and tense == "Past") or (tok.xpos == "VBN" and verbform == "Fin"):
            past = True
        if tok.xpos in ("VBZ", "VBP") or (finite and tense == "Pres"):
            present = True
    return np.array([float(past), float(present), float(future)])


def extract_group(
    group: FeatureGroup, annotated: AnnotatedSentence, ctx: FeatureContext
) -> np.ndarray:
    """Feature values of one group for one sentence, as float64 of group width."""
    tokens = annotated.tokens
    if group is FeatureGroup.BERT:
        if ctx.score_map is None:
            raise FeatureError("BERT group requires a score map")
        score = ctx.score_map.get(annotated.key)
        if score is None:
            raise FeatureError(
                f"no transformer score for {annotated.doc_id}:{annotated.line_no}"
            )
        return np.array([float(score)])
    if group is FeatureGroup.WE:
        if ctx.store is None:
            raise FeatureError("WE group requires an embedding store")
        return sentence_vector(tokens, ctx.store, policy=ctx.we_policy)
    if group is FeatureGroup.CT:
        if ctx.store is None or ctx.topic_set is None:
            raise FeatureError("CT group requires an embedding store and a topic set")
        return topic_similarities(tokens, ctx.topic_set, ctx.store)
    if group is FeatureGroup.CS:
        return np.array([float(sum(t.xpos == tag for t in tokens)) for tag in CS_TAGS])
    if group is FeatureGroup.HW:
        if ctx.word_list is None:
            raise FeatureError("HW group requires a word list")
        hit = any(t.lemma.lower() in ctx.word_list for t in tokens)
        return np.array([1.0 if hit else 0.0])
    if group is FeatureGroup.VT:
        return verb_tense_flags(tokens)
    if group is FeatureGroup.POS:
        return np.array([float(sum(t.upos == tag for t in tokens)) for tag in POS_TAGS])
    raise FeatureError(f"unknown group {group!r}")


def make_layout(
    enabled: Iterable[FeatureGroup], ctx: FeatureContext
) -> tuple[GroupSegment, ...]:
    """Canonical-order segments with prefix-sum offsets for the enabled groups."""
    enabled_set = set(enabled)
    if not enabled_set:
        raise FeatureError("no feature groups enabled")
    segments = []
    offset = 0
    for group in CANONICAL_ORDER:
        if group not in enabled_set:
            continue
        width = group_width(group, ctx)
        segments.append(GroupSegment(group=group, offset=offset, width=width))
        offset += width
    return tuple(segments)


def assemble_features(
    corpus: Corpus,
    index: AnnotationIndex,
    ctx: FeatureContext,
    enabled: Iterable[FeatureGroup],
) -> FeatureMatrix:
    """One row per corpus record (corpus order), groups in canonical order."""
    layout = make_layout(enabled, ctx)
    keys = tuple(corpus.keys())
    values = np.zeros((len(keys), sum(seg.width for seg in layout)), dtype=np.float64)
    for row, key in enumerate(keys):
        annotated = index.get(key)
        if annotated is None:
            raise FeatureError(f"no annotation for record {key[0]}:{key[1]}")
        for seg in layout:
            part = extract_group(seg.group, annotated, ctx)
            if part.shape != (seg.width,):
                raise FeatureError(
                    f"group {seg.group.value} produced {part.shape}, expected ({seg.width},)"
                )
            values[row, seg.offset : seg.offset + seg.width] = part
    return FeatureMatrix(keys=keys, values=values, layout=layout)


@dataclass(frozen=True)
class Standardizer:
    """Per-dimension training mean and population standard deviation.

    Dimensions with zero training variance transform to constant 0.
    """

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self) -> None:
        if self.mean.shape != self.std.shape or self.mean.ndim != 1:
            raise FeatureError("mean and std must be 1-D and the same shape")
        self.mean.setflags(write=False)
        self.std.setflags(write=False)

    @property
    def width(self) -> int:
        return self.mean.shape[0]

    @classmethod
    def fit(cls, values: np.ndarray) -> "Standardizer":
        if values.size == 0:
            raise FeatureError("cannot fit a standardizer on an empty matrix")
        return cls(mean=values.mean(axis=0), std=values.std(axis=0))

    def transform(self, values: np.ndarray) -> np.ndarray:
        if values.ndim != 2 or values.shape[1] != self.width:
            raise FeatureError(
                f"standardizer of width {self.width} applied to shape {values.shape}"
            )
        out = values - self.mean
        nonconstant = self.std > 0.0
        out[:, nonconstant] /= self.std[nonconstant]
        out[:, ~nonconstant] = 0.0
        return out


def standardize(
    matrix: FeatureMatrix, standardizer: Standardizer | None = None
) -> tuple[FeatureMatrix, Standardizer]:
    """Standardize a matrix, fitting on it unless a fitted Standardizer is given."""
    if len(matrix) == 0:
        raise FeatureError("cannot standardize an empty matrix")
    if standardizer is None:
        standardizer = Standardizer.fit(matrix.values)
    transformed = standardizer.transform(np.array(matrix.values))
    return (
        FeatureMatrix(keys=matrix.keys, values=transformed, layout=matrix.layout),
        standardizer,
    )


def matrix_to_tsv(matrix: FeatureMatrix) -> str:
    """Export for debugging/interop: doc_id, line_no, then <group>.<i> columns."""
    header = ["doc_id", "line_no"]
    for seg in matrix.layout:
        header.extend(f"{seg.group.value}.{i}" for i in range(seg.width))
    lines = ["\t".join(header)]
    for key, row in zip(matrix.keys, matrix.values):
        cells = [key[0], str(key[1])]
        cells.extend(repr(float(v)) for v in row)
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def all_group_subsets() -> list[frozenset[FeatureGroup]]:
    """All 127 non-empty subsets of the seven groups, in a stable order."""
    groups = list(CANONICAL_ORDER)
    subsets = []
    for r in range(1, len(groups) + 1):
        for combo in itertools.combinations(groups, r):
            subsets.append(frozenset(combo))
    return subsets
