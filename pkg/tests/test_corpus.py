"""Transcript parsing, gold label attachment, and corpus statistics."""

from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from checkworthy.corpus import (
    ClaimRecord,
    Corpus,
    Document,
    GoldLabelError,
    TranscriptParseError,
    attach_gold_labels,
    build_corpus,
    corpus_stats,
    load_transcript,
    parse_gold_tsv,
    parse_transcript_tsv,
    write_transcript_tsv,
)


class TestParseTranscript:
    def test_labeled_four_column(self):
        records = parse_transcript_tsv("1\tTRUMP\tHello.\t0\n2\tCLINTON\tTaxes fell.\t1\n", "d")
        assert [r.key for r in records] == [("d", 1), ("d", 2)]
        assert [r.label for r in records] == [0, 1]
        assert records[0].speaker == "TRUMP"
        assert records[1].text == "Taxes fell."

    def test_unlabeled_three_column(self):
        records = parse_transcript_tsv("1\tTRUMP\tHello.\n", "d")
        assert records[0].label is None

    def test_blank_lines_skipped(self):
        records = parse_transcript_tsv("\n1\tA\tx.\t0\n\n2\tB\ty.\t1\n\n", "d")
        assert len(records) == 2

    def test_bytes_input(self):
        records = parse_transcript_tsv(b"1\tA\tx.\t1\n", "d")
        assert records[0].label == 1

    def test_invalid_utf8_rejected(self):
        with pytest.raises(TranscriptParseError):
            parse_transcript_tsv(b"1\tA\t\xff\xfe\t1\n", "d")

    def test_wrong_field_count(self):
        with pytest.raises(TranscriptParseError, match="line 1"):
            parse_transcript_tsv("1\tonly-two\n", "d")
        with pytest.raises(TranscriptParseError):
            parse_transcript_tsv("1\tA\tx\t1\textra\n", "d")

    def test_bad_label(self):
        with pytest.raises(TranscriptParseError, match="label"):
            parse_transcript_tsv("1\tA\tx.\t2\n", "d")
        with pytest.raises(TranscriptParseError, match="label"):
            parse_transcript_tsv("1\tA\tx.\t1.0\n", "d")

    def test_bad_line_number(self):
        with pytest.raises(TranscriptParseError):
            parse_transcript_tsv("one\tA\tx.\t1\n", "d")

    def test_duplicate_line_number(self):
        with pytest.raises(TranscriptParseError, match="duplicate"):
            parse_transcript_tsv("1\tA\tx.\t1\n1\tB\ty.\t0\n", "d")

    def test_decreasing_line_number(self):
        with pytest.raises(TranscriptParseError, match="not increasing"):
            parse_transcript_tsv("2\tA\tx.\t1\n1\tB\ty.\t0\n", "d")

    def test_empty_text_rejected(self):
        with pytest.raises(TranscriptParseError, match="text"):
            parse_transcript_tsv("1\tA\t\t1\n", "d")

    def test_mixed_labeling_rejected(self):
        with pytest.raises(TranscriptParseError, match="label"):
            parse_transcript_tsv("1\tA\tx.\t1\n2\tB\ty.\n", "d")

    def test_error_carries_doc_and_line(self):
        with pytest.raises(TranscriptParseError) as err:
            parse_transcript_tsv("1\tA\tx.\t1\n\nbad line\n", "mydoc")
        assert err.value.doc_id == "mydoc"
        assert err.value.file_line == 3


class TestRoundTrip:
    def test_write_then_parse(self):
        text = "1\tA\tFirst claim.\t1\n3\tB\tSecond one.\t0\n"
        doc = Document("d", tuple(parse_transcript_tsv(text, "d")))
        assert write_transcript_tsv(doc) == text

    @given(
        st.lists(
            st.tuples(
                st.text(
                    alphabet=st.characters(blacklist_characters="\t\n\r", blacklist_categories=("Cs",)),
                    min_size=1,
                ).filter(lambda s: s.strip()),
                st.integers(min_value=0, max_value=1),
            ),
            min_size=1,
            max_size=8,
        )
    )
    def test_round_trip_any_text(self, rows):
        records = tuple(
            ClaimRecord("d", i + 1, "SPEAKER", text.strip(), label)
            for i, (text, label) in enumerate(rows)
        )
        doc = Document("d", records)
        assert parse_transcript_tsv(write_transcript_tsv(doc), "d") == list(records)


class TestDocumentAndCorpus:
    def test_line_numbers_must_increase(self):
        a = ClaimRecord("d", 2, "A", "x.", 1)
        b = ClaimRecord("d", 1, "A", "y.", 0)
        with pytest.raises(ValueError, match="increase"):
            Document("d", (a, b))

    def test_record_lookup(self, train_corpus):
        doc = train_corpus.document("train_alpha")
        assert doc.record(3).text.startswith("We're going")
        with pytest.raises(KeyError):
            doc.record(99)

    def test_all_or_none_labels(self):
        a = ClaimRecord("d", 1, "A", "x.", 1)
        b = ClaimRecord("d", 2, "A", "y.", None)
        with pytest.raises(ValueError, match="label"):
            Document("d", (a, b))

    def test_duplicate_doc_ids_rejected(self):
        doc = Document("d", (ClaimRecord("d", 1, "A", "x.", 1),))
        with pytest.raises(ValueError, match="duplicate"):
            Corpus((doc, doc))

    def test_split_validated(self):
        with pytest.raises(ValueError, match="split"):
            build_corpus([], split="dev")

    def test_keys_in_corpus_order(self, train_corpus):
        keys = train_corpus.keys()
        assert keys[0] == ("train_alpha", 1)
        assert keys[-1] == ("train_beta", 7)
        assert len(keys) == len(train_corpus)

    def test_load_transcript_uses_stem(self, fixtures_dir):
        doc = load_transcript(fixtures_dir / "train_alpha.tsv")
        assert doc.doc_id == "train_alpha"
        assert len(doc) == 8


class TestGoldLabels:
    def test_two_field_needs_doc_id(self):
        assert parse_gold_tsv("1\t1\n", default_doc_id="d") == {("d", 1): 1}
        with pytest.raises(GoldLabelError, match="doc_id"):
            parse_gold_tsv("1\t1\n")

    def test_three_field_carries_doc_id(self):
        assert parse_gold_tsv("d1\t3\t0\n") == {("d1", 3): 0}

    def test_duplicate_key(self):
        with pytest.raises(GoldLabelError, match="duplicate"):
            parse_gold_tsv("d\t1\t1\nd\t1\t0\n")

    def test_bad_label(self):
        with pytest.raises(GoldLabelError, match="label"):
            parse_gold_tsv("d\t1\tyes\n")

    def test_attach_full_coverage(self):
        doc = Document(
            "d",
            (
                ClaimRecord("d", 1, "A", "x.", None),
                ClaimRecord("d", 2, "A", "y.", None),
            ),
        )
        corpus = attach_gold_labels(build_corpus([doc]), "d\t1\t1\nd\t2\t0\n")
        assert [r.label for r in corpus.records()] == [1, 0]

    def test_attach_unknown_key(self):
        doc = Document("d", (ClaimRecord("d", 1, "A", "x.", None),))
        with pytest.raises(GoldLabelError, match="unknown"):
            attach_gold_labels(build_corpus([doc]), "d\t9\t1\n")

    def test_attach_partial_coverage_rejected(self):
        doc = Document(
            "d",
            (
                ClaimRecord("d", 1, "A", "x.", None),
                ClaimRecord("d", 2, "A", "y.", None),
            ),
        )
        with pytest.raises(GoldLabelError, match="unlabeled"):
            attach_gold_labels(build_corpus([doc]), "d\t1\t1\n")

    def test_attach_refuses_labeled_document(self, train_corpus):
        with pytest.raises(GoldLabelError, match="already labeled"):
            attach_gold_labels(train_corpus, "train_alpha\t1\t0\n")

    def test_untargeted_documents_pass_through(self):
        labeled = Document("a", (ClaimRecord("a", 1, "A", "x.", 1),))
        bare = Document("b", (ClaimRecord("b", 1, "A", "y.", None),))
        corpus = attach_gold_labels(build_corpus([labeled, bare]), "b\t1\t0\n")
        assert corpus.document("a").record(1).label == 1
        assert corpus.document("b").record(1).label == 0


class TestStats:
    def test_fixture_counts(self, train_corpus, test_corpus):
        train = corpus_stats(train_corpus)
        assert (train.doc_count, train.sentence_count, train.positive_count) == (2, 15, 9)
        test = corpus_stats(test_corpus)
        assert (test.doc_count, test.sentence_count, test.positive_count) == (2, 11, 5)

    def test_unlabeled_rejected(self):
        doc = Document("d", (ClaimRecord("d", 1, "A", "x.", None),))
        with pytest.raises(ValueError, match="unlabeled"):
            corpus_stats(build_corpus([doc]))
