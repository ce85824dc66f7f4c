"""CoNLL-U ingestion and alignment of token annotations to corpus records.

Linguistic annotation (tokenization, lemmas, POS tags, morphology) is an
input to this toolkit, not a computation: any tagger may produce it as long
as the output is CoNLL-U with a ``# sent_id = <doc_id>:<line_no>`` comment
per sentence.  Only columns 1-6 are consumed; multiword-token ranges
(``3-4``) and empty nodes (``5.1``) are skipped.

Stopword status is attached to each token at parse time from a bundled
list (one lowercase word per line) so downstream features do not depend on
any external toolkit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Collection, Mapping

from checkworthy.corpus import ClaimRecord, Corpus, Document


class ConlluParseError(ValueError):
    """A CoNLL-U block could not be parsed."""

    def __init__(self, block: int, message: str):
        super().__init__(f"block {block}: {message}")
        self.block = block


class AlignmentError(ValueError):
    """Annotations do not line up one-to-one with corpus records."""


@dataclass(frozen=True)
class Token:
    """One annotated token.

    ``xpos`` holds the fine-grained (Penn Treebank style) tag and may be
    ``"_"`` when unknown; ``morph`` holds key=value morphological features
    such as ``Tense=Past``.
    """

    surface: str
    lemma: str
    upos: str
    xpos: str
    morph: Mapping[str, str]
    is_stopword: bool = False

    def __post_init__(self) -> None:
        if not self.surface:
            raise ValueError("empty token surface")
        if not self.lemma:
            raise ValueError(f"token {self.surface!r}: empty lemma")
        if not self.xpos:
            raise ValueError(f"token {self.surface!r}: empty xpos (use '_' for unknown)")


@dataclass(frozen=True)
class AnnotatedSentence:
    doc_id: str
    line_no: int
    tokens: tuple[Token, ...]

    @property
    def key(self) -> tuple[str, int]:
        return (self.doc_id, self.line_no)


AnnotationIndex = dict[tuple[str, int], AnnotatedSentence]

_SENT_ID_RE = re.compile(r"^#\s*sent_id\s*=\s*(.+)$")
_RANGE_ID_RE = re.compile(r"^\d+-\d+$")
_EMPTY_NODE_ID_RE = re.compile(r"^\d+\.\d+$")


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Read a stopword list, one lowercase word per line."""
    words = set()
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        word = raw.strip()
        if word:
            words.add(word.lower())
    return frozenset(words)


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    """The bundled English stopword list."""
    text = resources.files("checkworthy.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def _parse_morph(field: str, block: int) -> dict[str, str]:
    if field == "_":
        return {}
    morph: dict[str, str] = {}
    for item in field.split("|"):
        key, sep, value = item.partition("=")
        if not sep or not key or not value:
            raise ConlluParseError(block, f"malformed morphology item {item!r}")
        morph[key] = value
    return morph


def _parse_block(
    lines: list[str], block: int, stopwords: Collection[str]
) -> AnnotatedSentence:
    sent_id: str | None = None
    tokens: list[Token] = []
    expected_id = 1
    for raw in lines:
        if raw.startswith("#"):
            match = _SENT_ID_RE.match(raw)
            if match:
                sent_id = match.group(1).strip()
            continue
        cols = raw.split("\t")
        if len(cols) != 10:
            raise ConlluParseError(block, f"expected 10 columns, got {len(cols)}")
        token_id = cols[0]
        if _RANGE_ID_RE.match(token_id) or _EMPTY_NODE_ID_RE.match(token_id):
            continue
        try:
            numeric_id = int(token_id)
        except ValueError:
            raise ConlluParseError(block, f"malformed token id {token_id!r}") from None
        if numeric_id != expected_id:
            raise ConlluParseError(
                block, f"non-contiguous token ids: expected {expected_id}, got {numeric_id}"
            )
        expected_id += 1
        surface, lemma, upos, xpos, feats = cols[1], cols[2], cols[3], cols[4], cols[5]
        try:
            tokens.append(
                Token(
                    surface=surface,
                    lemma=lemma,
                    upos=upos,
                    xpos=xpos,
                    morph=_parse_morph(feats, block),
                    is_stopword=surface.lower() in stopwords or lemma.lower() in stopwords,
                )
            )
        except ValueError as exc:
            raise ConlluParseError(block, str(exc)) from None

    if sent_id is None:
        raise ConlluParseError(block, "missing '# sent_id = <doc_id>:<line_no>' comment")
    doc_id, sep, line_field = sent_id.rpartition(":")
    if not sep or not doc_id:
        raise ConlluParseError(block, f"sent_id {sent_id!r} is not '<doc_id>:<line_no>'")
    try:
        line_no = int(line_field)
    except ValueError:
        raise ConlluParseError(block, f"sent_id {sent_id!r} has malformed line number") from None
    return AnnotatedSentence(doc_id=doc_id, line_no=line_no, tokens=tuple(tokens))


def parse_conllu(
    data: bytes | str, stopwords: Collection[str] | None = None
) -> list[AnnotatedSentence]:
    """Parse CoNLL-U text into annotated sentences, preserving block order.

    ``stopwords`` defaults to the bundled English list; pass an empty set to
    disable stopword marking.
    """
    if isinstance(data, bytes):
        text = data.decode("utf-8")
    else:
        text = data
    if stopwords is None:
        stopwords = default_stopwords()

    sentences: list[AnnotatedSentence] = []
    seen: set[tuple[str, int]] = set()
    block_lines: list[str] = []
    block_index = 1

    def flush() -> None:
        nonlocal block_index
        sentence = _parse_block(block_lines, block_index, stopwords)
        if sentence.key in seen:
            raise ConlluParseError(
                block_index, f"duplicate sent_id {sentence.doc_id}:{sentence.line_no}"
            )
        seen.add(sentence.key)
        sentences.append(sentence)
        block_index += 1
        block_lines.clear()

    for raw in text.splitlines():
        if raw.strip():
            block_lines.append(raw)
            continue
        if block_lines:
            flush()
    if block_lines:
        flush()
    return sentences


def write_conllu(sentences: list[AnnotatedSentence]) -> str:
    """Serialize sentences back to the CoNLL-U subset read by this module."""
    blocks = []
    for sent in sentences:
        lines = [f"# sent_id = {sent.doc_id}:{sent.line_no}"]
        for i, tok in enumerate(sent.tokens, start=1):
            feats = "|".join(f"{k}={v}" for k, v in tok.morph.items()) or "_"
            lines.append(
                "\t".join(
                    [str(i), tok.surface, tok.lemma, tok.upos, tok.xpos, feats, "_", "_", "_", "_"]
                )
            )
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def align_annotations(
    sentences: list[AnnotatedSentence], corpus: Corpus
) -> AnnotationIndex:
    """Build a total (doc_id, line_no) -> AnnotatedSentence map over the corpus."""
    index: AnnotationIndex = {}
    duplicates = []
    for sent in sentences:
        if sent.key in index:
            duplicates.append(sent.key)
        index[sent.key] = sent
    if duplicates:
        shown = ", ".join(f"{d}:{n}" for d, n in duplicates[:20])
        raise AlignmentError(f"duplicate key(s) in annotations: {shown}")

    corpus_keys = set(corpus.keys())
    unknown = sorted(k for k in index if k not in corpus_keys)
    if unknown:
        shown = ", ".join(f"{d}:{n}" for d, n in unknown[:20])
        raise AlignmentError(f"annotation(s) for unknown record(s): {shown}")
    missing = sorted(k for k in corpus_keys if k not in index)
    if missing:
        shown = ", ".join(f"{d}:{n}" for d, n in missing[:20])
        raise AlignmentError(f"missing annotation(s) for {len(missing)} record(s): {shown}")
    return index


_WORD_RE = re.compile(r"[A-Za-z0-9]+(?:['’-][A-Za-z0-9]+)*|[^\sA-Za-z0-9]")


def basic_annotate(
    corpus: Corpus, stopwords: Collection[str] | None = None
) -> AnnotationIndex:
    """Produce a bare-bones annotation index by regex tokenization.

    Lemmas are lowercased surfaces, ``upos`` is ``X`` and ``xpos`` is ``_``,
    so only embedding-based feature groups are meaningful on top of this.
    Intended for embedding-only experiments when no tagger output is at hand.
    """
    if stopwords is None:
        stopwords = default_stopwords()
    sentences = []
    for rec in corpus.records():
        tokens = tuple(
            Token(
                surface=m.group(0),
                lemma=m.group(0).lower(),
                upos="X",
                xpos="_",
                morph={},
                is_stopword=m.group(0).lower() in stopwords,
            )
            for m in _WORD_RE.finditer(rec.text)
        )
        if not tokens:
            tokens = (
                Token(
                    surface=rec.text.strip(),
                    lemma=rec.text.strip().lower(),
                    upos="X",
                    xpos="_",
                    morph={},
                    is_stopword=False,
                ),
            )
        sentences.append(AnnotatedSentence(rec.doc_id, rec.line_no, tokens))
    return {sentence.key: sentence for sentence in sentences}


def record_for(corpus: Corpus, key: tuple[str, int]) -> ClaimRecord:
    """Look up a record by (doc_id, line_no); raises KeyError when absent."""
    doc = corpus.document(key[0])
    for rec in doc.records:
        if rec.line_no == key[1]:
            return rec
    raise KeyError(key)


def document_keys(document: Document) -> list[tuple[str, int]]:
    return [rec.key for rec in document.records]
