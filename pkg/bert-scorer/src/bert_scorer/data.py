"""Transcript TSV intake, independent of the ranking toolkit.

The sidecar and the ranker share file formats, not code, so this module
reads the transcript layout on its own: one sentence per line, tab
separated as ``line_no<TAB>speaker<TAB>text`` with a fourth ``label``
column (0 or 1) on training data.  A file's document id is its stem.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence


class DataError(ValueError):
    """A transcript file does not follow the expected TSV layout."""


@dataclass(frozen=True)
class Sentence:
    doc_id: str
    line_no: int
    text: str
    label: int | None = None

    @property
    def key(self) -> tuple[str, int]:
        return (self.doc_id, self.line_no)


def read_transcript(path: str | Path, doc_id: str | None = None) -> list[Sentence]:
    """Parse one transcript file; labels are optional but must be uniform."""
    path = Path(path)
    doc = doc_id if doc_id is not None else path.stem
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    sentences: list[Sentence] = []
    seen: set[int] = set()
    labeled: bool | None = None
    # split on newlines only; texts may contain other Unicode line breaks
    for file_line, raw in enumerate(text.split("\n"), 1):
        raw = raw.rstrip("\r")
        if not raw.strip():
            continue
        where = f"{path} line {file_line}"
        fields = raw.split("\t")
        if len(fields) not in (3, 4):
            raise DataError(f"{where}: expected 3 or 4 tab-separated fields, got {len(fields)}")
        try:
            line_no = int(fields[0])
        except ValueError:
            raise DataError(f"{where}: line_no {fields[0]!r} is not an integer") from None
        if line_no in seen:
            raise DataError(f"{where}: duplicate line_no {line_no}")
        seen.add(line_no)
        if not fields[2].strip():
            raise DataError(f"{where}: empty text field")
        label: int | None = None
        if len(fields) == 4:
            if fields[3] not in ("0", "1"):
                raise DataError(f"{where}: label must be 0 or 1, got {fields[3]!r}")
            label = int(fields[3])
        has_label = label is not None
        if labeled is None:
            labeled = has_label
        elif labeled != has_label:
            raise DataError(f"{where}: file mixes labeled and unlabeled lines")
        sentences.append(Sentence(doc, line_no, fields[2], label))
    if not sentences:
        raise DataError(f"{path}: no sentences")
    return sentences


def read_corpus(paths: Sequence[str | Path]) -> list[Sentence]:
    """Read files and/or directories of ``*.tsv`` transcripts, in input order."""
    files: list[Path] = []
    for entry in paths:
        p = Path(entry)
        if p.is_dir():
            found = sorted(p.glob("*.tsv"))
            if not found:
                raise DataError(f"{p}: directory contains no .tsv transcripts")
            files.extend(found)
        else:
            files.append(p)
    sentences: list[Sentence] = []
    keys: set[tuple[str, int]] = set()
    for f in files:
        for sentence in read_transcript(f):
            if sentence.key in keys:
                raise DataError(
                    f"duplicate sentence key {sentence.doc_id}:{sentence.line_no} across inputs"
                )
            keys.add(sentence.key)
            sentences.append(sentence)
    return sentences


def require_labels(sentences: Sequence[Sentence]) -> list[int]:
    """Labels for training, rejecting unlabeled or single-class data."""
    if not sentences:
        raise DataError("no training sentences")
    missing = [s for s in sentences if s.label is None]
    if missing:
        first = missing[0]
        raise DataError(
            f"{len(missing)} sentences are unlabeled, first {first.doc_id}:{first.line_no}; "
            "training needs the 4-column labeled format"
        )
    labels = [int(s.label) for s in sentences]  # type: ignore[arg-type]
    if len(set(labels)) < 2:
        raise DataError("training labels are single-class; need both 0 and 1")
    return labels
