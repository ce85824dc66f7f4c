"""Transcript and gold-label ingestion.

Transcript files are UTF-8 TSV with columns ``line_no \\t speaker \\t text``
and an optional fourth ``label`` column (``0`` or ``1``).  Tabs cannot occur
inside the text field; there is no quoting.  Gold label files carry either
``line_no \\t label`` or ``doc_id \\t line_no \\t label`` per line.

Parsing is strict by design: silently skipping or coercing a malformed line
would desynchronize transcripts from their gold labels.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator


class TranscriptParseError(ValueError):
    """A transcript line could not be parsed."""

    def __init__(self, doc_id: str, file_line: int, message: str):
        super().__init__(f"{doc_id}, line {file_line}: {message}")
        self.doc_id = doc_id
        self.file_line = file_line


class GoldLabelError(ValueError):
    """Gold labels are malformed or do not match the corpus."""


@dataclass(frozen=True)
class ClaimRecord:
    """One transcript sentence.

    ``label`` is 1 for check-worthy, 0 for not, ``None`` while unlabeled.
    """

    doc_id: str
    line_no: int
    speaker: str
    text: str
    label: int | None = None

    def __post_init__(self) -> None:
        if self.line_no < 1:
            raise ValueError(f"line_no must be positive, got {self.line_no}")
        if not self.text.strip():
            raise ValueError(f"{self.doc_id}:{self.line_no}: empty text")
        for field_name in ("speaker", "text"):
            value = getattr(self, field_name)
            if any(ch in value for ch in "\t\n\r"):
                raise ValueError(
                    f"{self.doc_id}:{self.line_no}: {field_name} contains a tab or newline"
                )
        if self.label is not None and self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")

    @property
    def key(self) -> tuple[str, int]:
        return (self.doc_id, self.line_no)


@dataclass(frozen=True)
class Document:
    """An ordered run of records from a single transcript file."""

    doc_id: str
    records: tuple[ClaimRecord, ...]

    def __post_init__(self) -> None:
        prev = 0
        labeled = 0
        for rec in self.records:
            if rec.doc_id != self.doc_id:
                raise ValueError(
                    f"record {rec.doc_id}:{rec.line_no} inside document {self.doc_id!r}"
                )
            if rec.line_no <= prev:
                raise ValueError(
                    f"{self.doc_id}: line_no {rec.line_no} does not increase (previous {prev})"
                )
            prev = rec.line_no
            labeled += rec.label is not None
        if labeled not in (0, len(self.records)):
            raise ValueError(
                f"{self.doc_id}: {labeled} of {len(self.records)} records labeled; "
                "a document must be fully labeled or fully unlabeled"
            )

    @property
    def is_labeled(self) -> bool:
        return bool(self.records) and self.records[0].label is not None

    def record(self, line_no: int) -> ClaimRecord:
        for rec in self.records:
            if rec.line_no == line_no:
                return rec
        raise KeyError((self.doc_id, line_no))

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class Corpus:
    """Immutable ordered collection of documents with a split tag."""

    documents: tuple[Document, ...]
    split: str = "train"

    def __post_init__(self) -> None:
        if self.split not in ("train", "test"):
            raise ValueError(f"split must be 'train' or 'test', got {self.split!r}")
        seen: set[str] = set()
        for doc in self.documents:
            if doc.doc_id in seen:
                raise ValueError(f"duplicate doc_id {doc.doc_id!r}")
            seen.add(doc.doc_id)

    def document(self, doc_id: str) -> Document:
        for doc in self.documents:
            if doc.doc_id == doc_id:
                return doc
        raise KeyError(doc_id)

    def records(self) -> Iterator[ClaimRecord]:
        for doc in self.documents:
            yield from doc.records

    def keys(self) -> list[tuple[str, int]]:
        return [rec.key for rec in self.records()]

    @property
    def is_labeled(self) -> bool:
        return all(doc.is_labeled for doc in self.documents)

    def __len__(self) -> int:
        return sum(len(doc) for doc in self.documents)


@dataclass(frozen=True)
class CorpusStats:
    doc_count: int
    sentence_count: int
    positive_count: int


def parse_transcript_tsv(data: bytes | str, doc_id: str) -> list[ClaimRecord]:
    """Parse one transcript file into records, strictly.

    Accepts LF or CRLF line endings and skips blank lines.  Every content
    line must have 3 fields (unlabeled) or 4 fields (labeled); a single file
    may not mix the two.  Errors carry ``doc_id`` and the 1-based file line.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TranscriptParseError(doc_id, 0, f"not valid UTF-8: {exc}") from None
    else:
        text = data

    records: list[ClaimRecord] = []
    prev_line_no = 0
    labeled_count = 0
    # split on newlines only: splitlines() would also break records on
    # form feeds and other unicode boundaries that are legal inside text
    for file_line, raw in enumerate(text.split("\n"), start=1):
        raw = raw.rstrip("\r")
        if not raw.strip():
            continue
        fields = raw.split("\t")
        if len(fields) not in (3, 4):
            raise TranscriptParseError(
                doc_id, file_line, f"expected 3 or 4 tab-separated fields, got {len(fields)}"
            )
        try:
            line_no = int(fields[0])
        except ValueError:
            raise TranscriptParseError(
                doc_id, file_line, f"malformed line number {fields[0]!r}"
            ) from None
        if line_no == prev_line_no:
            raise TranscriptParseError(doc_id, file_line, f"duplicate line_no {line_no}")
        if line_no < prev_line_no:
            raise TranscriptParseError(
                doc_id, file_line, f"line_no {line_no} not increasing (previous {prev_line_no})"
            )
        speaker = fields[1]
        sentence = fields[2]
        if not sentence.strip():
            raise TranscriptParseError(doc_id, file_line, "empty text field")
        label: int | None = None
        if len(fields) == 4:
            if fields[3] not in ("0", "1"):
                raise TranscriptParseError(doc_id, file_line, f"invalid label {fields[3]!r}")
            label = int(fields[3])
            labeled_count += 1
        records.append(
            ClaimRecord(doc_id=doc_id, line_no=line_no, speaker=speaker, text=sentence, label=label)
        )
        if labeled_count not in (0, len(records)):
            raise TranscriptParseError(
                doc_id, file_line, "mixes labeled and unlabeled lines in one document"
            )
        prev_line_no = line_no
    return records


def load_transcript(path: str | Path, doc_id: str | None = None) -> Document:
    """Read a transcript file; ``doc_id`` defaults to the file stem."""
    path = Path(path)
    resolved_id = doc_id if doc_id is not None else path.stem
    return Document(resolved_id, tuple(parse_transcript_tsv(path.read_bytes(), resolved_id)))


def write_transcript_tsv(document: Document) -> str:
    """Serialize a document back to transcript TSV (4 columns when labeled)."""
    lines = []
    for rec in document.records:
        cols = [str(rec.line_no), rec.speaker, rec.text]
        if rec.label is not None:
            cols.append(str(rec.label))
        lines.append("\t".join(cols))
    return "\n".join(lines) + "\n"


def build_corpus(documents: Iterable[Document], split: str = "train") -> Corpus:
    return Corpus(tuple(documents), split=split)


def parse_gold_tsv(
    data: bytes | str, default_doc_id: str | None = None
) -> dict[tuple[str, int], int]:
    """Parse gold labels into a (doc_id, line_no) -> label map.

    Two-field lines (``line_no \\t label``) require ``default_doc_id``.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise GoldLabelError(f"gold file is not valid UTF-8: {exc}") from None
    else:
        text = data

    gold: dict[tuple[str, int], int] = {}
    for file_line, raw in enumerate(text.split("\n"), start=1):
        raw = raw.rstrip("\r")
        if not raw.strip():
            continue
        fields = raw.split("\t")
        if len(fields) == 2:
            if default_doc_id is None:
                raise GoldLabelError(
                    f"gold line {file_line}: two-field line but no doc_id was given"
                )
            doc_id, line_field, label_field = default_doc_id, fields[0], fields[1]
        elif len(fields) == 3:
            doc_id, line_field, label_field = fields
        else:
            raise GoldLabelError(
                f"gold line {file_line}: expected 2 or 3 tab-separated fields, got {len(fields)}"
            )
        try:
            line_no = int(line_field)
        except ValueError:
            raise GoldLabelError(
                f"gold line {file_line}: malformed line number {line_field!r}"
            ) from None
        if label_field not in ("0", "1"):
            raise GoldLabelError(f"gold line {file_line}: invalid label {label_field!r}")
        key = (doc_id, line_no)
        if key in gold:
            raise GoldLabelError(f"gold line {file_line}: duplicate key {key}")
        gold[key] = int(label_field)
    return gold


def attach_gold_labels(
    corpus: Corpus, gold: bytes | str, doc_id: str | None = None
) -> Corpus:
    """Return a new corpus with gold labels attached.

    Documents referenced by the gold stream must end up fully labeled;
    gold entries pointing at unknown records are an error.  Attaching onto
    an already-labeled document is refused to catch double application.
    """
    gold_map = parse_gold_tsv(gold, default_doc_id=doc_id)
    if not gold_map:
        raise GoldLabelError("gold stream contains no labels")
    targeted = {key[0] for key in gold_map}

    known_docs = {doc.doc_id for doc in corpus.documents}
    known_keys = set(corpus.keys())
    unknown = sorted(k for k in gold_map if k[0] not in known_docs or k not in known_keys)
    if unknown:
        shown = ", ".join(f"{d}:{n}" for d, n in unknown[:20])
        raise GoldLabelError(f"gold references {len(unknown)} unknown line(s): {shown}")

    new_docs: list[Document] = []
    missing: list[tuple[str, int]] = []
    for doc in corpus.documents:
        if doc.doc_id not in targeted:
            new_docs.append(doc)
            continue
        if doc.is_labeled:
            raise GoldLabelError(f"document {doc.doc_id!r} is already labeled")
        new_records = []
        for rec in doc.records:
            label = gold_map.get(rec.key)
            if label is None:
                missing.append(rec.key)
                continue
            new_records.append(replace(rec, label=label))
        if not missing:
            new_docs.append(Document(doc.doc_id, tuple(new_records)))
    if missing:
        shown = ", ".join(f"{d}:{n}" for d, n in missing[:20])
        raise GoldLabelError(
            f"{len(missing)} record(s) left unlabeled after attachment: {shown}"
        )
    return Corpus(tuple(new_docs), split=corpus.split)


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Exact document / sentence / positive counts over a fully labeled corpus."""
    sentences = 0
    positives = 0
    for rec in corpus.records():
        if rec.label is None:
            raise ValueError(f"unlabeled record {rec.doc_id}:{rec.line_no}")
        sentences += 1
        positives += rec.label
    return CorpusStats(
        doc_count=len(corpus.documents),
        sentence_count=sentences,
        positive_count=positives,
    )
