"""Embedding file loading, sentence vectors, and cosine similarity."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from checkworthy.annotation import Token
from checkworthy.embedding import (
    EmbeddingLoadError,
    EmbeddingStore,
    cosine,
    load_embeddings_text,
    load_vocab_restriction,
    restriction_for,
    sentence_vector,
)


def _tok(surface, stop=False):
    return Token(surface, surface.lower(), "X", "_", {}, is_stopword=stop)


class TestLoad:
    def test_fixture_file(self, store):
        assert store.dim == 6
        assert len(store) == 109
        assert store.lookup("economy").shape == (6,)

    def test_vectors_stored_float32(self, store):
        assert store.lookup("economy").dtype == np.float32

    def test_lowercase_fallback(self, store):
        assert np.array_equal(store.lookup("Economy"), store.lookup("economy"))
        assert store.lookup("notaword") is None
        assert "economy" in store and "notaword" not in store

    def test_exact_match_wins(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("2 2\nUS 1.0 0.0\nus 0.0 1.0\n")
        loaded = load_embeddings_text(path)
        assert np.allclose(loaded.lookup("US"), [1.0, 0.0])
        assert np.allclose(loaded.lookup("us"), [0.0, 1.0])

    def test_restriction_keeps_subset(self, fixtures_dir):
        restricted = load_embeddings_text(
            fixtures_dir / "embeddings.txt", restrict=frozenset({"economy", "tax"})
        )
        assert len(restricted) == 2
        assert restricted.lookup("border") is None

    def test_restriction_for_adds_lowercase(self):
        words = restriction_for(["Economy", "Tax"])
        assert {"Economy", "economy", "Tax", "tax"} <= set(words)

    def test_vocab_restriction_file(self, tmp_path):
        path = tmp_path / "vocab.txt"
        path.write_text("Economy\ntax\n\n")
        assert {"Economy", "economy", "tax"} <= set(load_vocab_restriction(path))

    def test_header_errors(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("nonsense\n")
        with pytest.raises(EmbeddingLoadError, match="header"):
            load_embeddings_text(path)
        path.write_text("2 0\n")
        with pytest.raises(EmbeddingLoadError):
            load_embeddings_text(path)

    def test_component_count_error(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("1 3\nword 1.0 2.0\n")
        with pytest.raises(EmbeddingLoadError, match="3"):
            load_embeddings_text(path)

    def test_non_numeric_error(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("1 2\nword 1.0 abc\n")
        with pytest.raises(EmbeddingLoadError, match="line 2"):
            load_embeddings_text(path)

    def test_non_finite_error(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("1 2\nword 1.0 inf\n")
        with pytest.raises(EmbeddingLoadError, match="finite"):
            load_embeddings_text(path)

    def test_count_mismatch_error(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("2 2\nword 1.0 2.0\n")
        with pytest.raises(EmbeddingLoadError, match="2"):
            load_embeddings_text(path)
        path.write_text("1 2\na 1.0 2.0\nb 3.0 4.0\n")
        with pytest.raises(EmbeddingLoadError):
            load_embeddings_text(path)

    def test_duplicate_word_error(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("2 2\nword 1.0 2.0\nword 3.0 4.0\n")
        with pytest.raises(EmbeddingLoadError, match="duplicate"):
            load_embeddings_text(path)

    def test_vectors_write_protected(self, store):
        with pytest.raises(ValueError):
            store.lookup("economy")[0] = 5.0


class TestSentenceVector:
    def test_mean_of_found_words(self, store):
        tokens = [_tok("economy"), _tok("tax")]
        expected = (
            store.lookup("economy").astype(np.float64) + store.lookup("tax").astype(np.float64)
        ) / 2.0
        got = sentence_vector(tokens, store)
        assert got.dtype == np.float64
        np.testing.assert_allclose(got, expected, rtol=0, atol=1e-15)

    def test_oov_tokens_skipped(self, store):
        with_oov = sentence_vector([_tok("economy"), _tok("zzzz")], store)
        alone = sentence_vector([_tok("economy")], store)
        np.testing.assert_array_equal(with_oov, alone)

    def test_all_oov_gives_zero_vector(self, store):
        np.testing.assert_array_equal(
            sentence_vector([_tok("zzzz")], store), np.zeros(6)
        )

    def test_content_words_policy_drops_stopwords(self, store):
        tokens = [_tok("the", stop=True), _tok("economy")]
        content = sentence_vector(tokens, store, policy="content_words")
        np.testing.assert_array_equal(content, sentence_vector([_tok("economy")], store))
        every = sentence_vector(tokens, store, policy="all_words")
        assert not np.array_equal(every, content)

    def test_unknown_policy(self, store):
        with pytest.raises(ValueError, match="policy"):
            sentence_vector([_tok("economy")], store, policy="some_words")


class TestCosine:
    def test_hand_values(self):
        assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0
        assert cosine(np.array([1.0, 0.0]), np.array([2.0, 0.0])) == pytest.approx(1.0)
        assert cosine(np.array([1.0, 0.0]), np.array([-3.0, 0.0])) == pytest.approx(-1.0)
        assert cosine(np.array([1.0, 1.0]), np.array([1.0, 0.0])) == pytest.approx(
            1.0 / np.sqrt(2.0)
        )

    def test_zero_norm_is_zero(self):
        assert cosine(np.zeros(3), np.array([1.0, 2.0, 3.0])) == 0.0
        assert cosine(np.zeros(3), np.zeros(3)) == 0.0

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            cosine(np.zeros(3), np.zeros(4))

    @given(
        st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=6),
        st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=6),
    )
    def test_bounded_and_symmetric(self, u, v):
        n = min(len(u), len(v))
        a, b = np.array(u[:n]), np.array(v[:n])
        val = cosine(a, b)
        assert -1.0 <= val <= 1.0
        assert cosine(b, a) == val

    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=6))
    def test_self_similarity(self, u):
        a = np.array(u)
        if np.linalg.norm(a) > 1e-6:
            assert cosine(a, a) == pytest.approx(1.0)
