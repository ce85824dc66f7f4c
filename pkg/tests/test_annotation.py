"""CoNLL-U parsing, corpus alignment, and the fallback tokenizer."""

from __future__ import annotations

import pytest

from checkworthy.annotation import (
    AlignmentError,
    ConlluParseError,
    Token,
    basic_annotate,
    default_stopwords,
    load_stopwords,
    parse_conllu,
    write_conllu,
)
from checkworthy.corpus import ClaimRecord, Document, build_corpus

GOING_TO = """# sent_id = d:1
1-2\tWe're\t_\t_\t_\t_\t_\t_\t_\t_
1\tWe\twe\tPRON\tPRP\tCase=Nom|Number=Plur\t_\t_\t_\t_
2\t're\tbe\tAUX\tVBP\tMood=Ind|Tense=Pres|VerbForm=Fin\t_\t_\t_\t_
3\twinning\twin\tVERB\tVBG\tVerbForm=Ger\t_\t_\t_\t_
4\t.\t.\tPUNCT\t.\t_\t_\t_\t_\t_
"""


class TestParseConllu:
    def test_fixture_tokens(self, fixtures_dir):
        sentences = parse_conllu((fixtures_dir / "train_alpha.conllu").read_text())
        assert len(sentences) == 8
        by_key = {s.key: s for s in sentences}
        fell = by_key[("train_alpha", 2)].tokens[1]
        assert (fell.surface, fell.lemma, fell.upos, fell.xpos) == ("fell", "fall", "VERB", "VBD")
        assert fell.morph["Tense"] == "Past"
        assert fell.morph["VerbForm"] == "Fin"

    def test_range_lines_skipped(self, fixtures_dir):
        sentences = parse_conllu((fixtures_dir / "train_alpha.conllu").read_text())
        going = next(s for s in sentences if s.key == ("train_alpha", 3))
        assert len(going.tokens) == 12
        assert going.tokens[0].surface == "We"
        assert going.tokens[1].surface == "'re"

    def test_empty_nodes_skipped(self):
        text = GOING_TO + "\n# sent_id = d:2\n1\tSure\tsure\tADJ\tJJ\t_\t_\t_\t_\t_\n1.1\tis\tbe\tAUX\tVBZ\t_\t_\t_\t_\t_\n2\t.\t.\tPUNCT\t.\t_\t_\t_\t_\t_\n"
        sentences = parse_conllu(text)
        assert [t.surface for t in sentences[1].tokens] == ["Sure", "."]

    def test_stopwords_marked(self):
        sentences = parse_conllu(GOING_TO)
        tokens = {t.surface: t for t in sentences[0].tokens}
        assert tokens["We"].is_stopword
        assert tokens["'re"].is_stopword  # lemma "be"
        assert not tokens["winning"].is_stopword

    def test_sent_id_required(self):
        with pytest.raises(ConlluParseError, match="sent_id"):
            parse_conllu("1\tHi\thi\tINTJ\tUH\t_\t_\t_\t_\t_\n")

    def test_sent_id_with_colons_in_doc_id(self):
        text = "# sent_id = a:b:3\n1\tHi\thi\tINTJ\tUH\t_\t_\t_\t_\t_\n"
        sentence = parse_conllu(text)[0]
        assert sentence.key == ("a:b", 3)

    def test_column_count_enforced(self):
        with pytest.raises(ConlluParseError, match="10"):
            parse_conllu("# sent_id = d:1\n1\tHi\thi\tINTJ\tUH\t_\n")

    def test_noncontiguous_ids_rejected(self):
        text = "# sent_id = d:1\n1\tHi\thi\tINTJ\tUH\t_\t_\t_\t_\t_\n3\t.\t.\tPUNCT\t.\t_\t_\t_\t_\t_\n"
        with pytest.raises(ConlluParseError, match="contiguous"):
            parse_conllu(text)

    def test_duplicate_sentence_rejected(self):
        with pytest.raises(ConlluParseError, match="duplicate"):
            parse_conllu(GOING_TO + "\n" + GOING_TO)

    def test_round_trip(self, fixtures_dir):
        text = (fixtures_dir / "train_beta.conllu").read_text()
        sentences = parse_conllu(text)
        assert parse_conllu(write_conllu(sentences)) == sentences


class TestAlignment:
    def _corpus(self):
        doc = Document(
            "d",
            (
                ClaimRecord("d", 1, "A", "We're winning.", 1),
                ClaimRecord("d", 2, "A", "Sure.", 0),
            ),
        )
        return build_corpus([doc])

    def test_missing_annotation(self):
        with pytest.raises(AlignmentError, match="d:2"):
            from checkworthy.annotation import align_annotations

            align_annotations(parse_conllu(GOING_TO), self._corpus())

    def test_unknown_annotation(self):
        from checkworthy.annotation import align_annotations

        extra = GOING_TO.replace("d:1", "other:9")
        sentences = parse_conllu(GOING_TO + "\n" + extra)
        doc = Document("d", (ClaimRecord("d", 1, "A", "We're winning.", 1),))
        with pytest.raises(AlignmentError, match="other:9"):
            align_annotations(sentences, build_corpus([doc]))

    def test_full_alignment(self, train_corpus, train_index):
        assert set(train_index) == set(train_corpus.keys())


class TestBasicAnnotate:
    def test_tokenization(self):
        doc = Document("d", (ClaimRecord("d", 1, "A", "We're winning, folks!", 1),))
        index = basic_annotate(build_corpus([doc]))
        tokens = index[("d", 1)].tokens
        assert [t.surface for t in tokens] == ["We're", "winning", ",", "folks", "!"]
        assert tokens[0].lemma == "we're"
        assert all(t.upos == "X" and t.xpos == "_" for t in tokens)

    def test_stopwords_from_lowercased_surface(self):
        doc = Document("d", (ClaimRecord("d", 1, "A", "The economy grew.", 1),))
        index = basic_annotate(build_corpus([doc]))
        flags = {t.surface: t.is_stopword for t in index[("d", 1)].tokens}
        assert flags["The"] and not flags["economy"]


class TestStopwords:
    def test_default_list(self):
        stopwords = default_stopwords()
        assert {"the", "a", "of", "and"} <= stopwords
        assert "economy" not in stopwords

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "sw.txt"
        path.write_text("foo\nBar\n\n")
        assert load_stopwords(path) == {"foo", "bar"}


class TestToken:
    def test_validation(self):
        with pytest.raises(ValueError):
            Token("", "x", "NOUN", "NN", {})
        with pytest.raises(ValueError):
            Token("x", "", "NOUN", "NN", {})
