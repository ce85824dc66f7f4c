#!/usr/bin/env python3
"""Normalize the public CLEF Check That! task files into this repo's layout.

The upstream task repositories ship one tab-separated transcript per debate
(line number, speaker, text, label).  This script validates each file with
the package's strict parser and writes clean copies under::

    <out>/ctl18/train/*.tsv   <out>/ctl18/test/*.tsv
    <out>/ctl19/train/*.tsv   <out>/ctl19/test/*.tsv

which is the layout the ingestion acceptance check expects (point
CTL_DATA_DIR at <out>).  Sources are given per split, as directories or
single files; .tsv and .txt files are picked up either way.  Use the
annotated/labeled variants of the test files, since evaluation needs gold
labels on both splits.

Example:

    python3 scripts/prepare_ctl_data.py \\
        --ctl18-train clef2018/data/task1/English/train \\
        --ctl18-test  clef2018/data/task1/English/test_annotated \\
        --ctl19-train clef2019/data/training \\
        --ctl19-test  clef2019/data/test_annotated \\
        --out data
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from checkworthy.corpus import (  # noqa: E402 - path set up above
    build_corpus,
    corpus_stats,
    load_transcript,
    write_transcript_tsv,
)

EXPECTED = {
    ("ctl18", "train"): (3, 4064, 90),
    ("ctl18", "test"): (7, 4882, 192),
    ("ctl19", "train"): (19, 16421, 433),
    ("ctl19", "test"): (7, 7079, 110),
}


def source_files(source: Path) -> list[Path]:
    if source.is_file():
        return [source]
    if not source.is_dir():
        raise SystemExit(f"error: {source} is neither a file nor a directory")
    files = sorted(p for p in source.iterdir() if p.suffix in (".tsv", ".txt"))
    if not files:
        raise SystemExit(f"error: {source} contains no .tsv or .txt files")
    return files


def prepare_split(source: Path, target: Path, year: str, split: str) -> None:
    target.mkdir(parents=True, exist_ok=True)
    documents = []
    for path in source_files(source):
        try:
            document = load_transcript(path)
        except ValueError as exc:
            raise SystemExit(f"error: {path}: {exc}") from None
        if any(record.label is None for record in document.records):
            raise SystemExit(
                f"error: {path} has unlabeled lines; use the annotated variant "
                f"of the {split} files"
            )
        documents.append(document)
        (target / f"{path.stem}.tsv").write_text(
            write_transcript_tsv(document), encoding="utf-8"
        )
    stats = corpus_stats(build_corpus(documents, split=split))
    got = (stats.doc_count, stats.sentence_count, stats.positive_count)
    want = EXPECTED[(year, split)]
    marker = "ok" if got == want else f"MISMATCH, published counts are {want}"
    print(
        f"{year}/{split}: {got[0]} documents, {got[1]} sentences, "
        f"{got[2]} positives ({marker})"
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        description=__doc__.split("\n", 1)[0],
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__.split("\n\n", 1)[1],
    )
    for year in ("ctl18", "ctl19"):
        for split in ("train", "test"):
            parser.add_argument(
                f"--{year}-{split}",
                type=Path,
                metavar="PATH",
                help=f"directory (or single file) holding the {year} {split} transcripts",
            )
    parser.add_argument(
        "--out", type=Path, default=Path("data"), help="output root (default: data)"
    )
    args = parser.parse_args(argv)

    requested = [
        (year, split, getattr(args, f"{year}_{split}"))
        for year in ("ctl18", "ctl19")
        for split in ("train", "test")
        if getattr(args, f"{year}_{split}") is not None
    ]
    if not requested:
        parser.error("nothing to do; pass at least one --ctl18-*/--ctl19-* source")
    for year, split, source in requested:
        prepare_split(source, args.out / year / split, year, split)
    return 0


if __name__ == "__main__":
    sys.exit(main())
