import gzip
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from marginalia.embed import (
    EmbeddingStore,
    GloveFormatError,
    cosine,
    load_glove,
    sentence_embedding,
)

finite_floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


def vector_pairs(dim=4):
    vec = st.lists(finite_floats, min_size=dim, max_size=dim)
    return st.tuples(vec, vec)


class TestLoadGlove:
    def test_minimal_valid_file(self, tmp_path):
        path = tmp_path / "vecs.txt"
        path.write_text("a 1.0 0.0\nb 0.0 1.0\n", encoding="utf-8")
        store = load_glove(str(path))
        assert store.dimension == 2
        assert store.vocab_size == 2
        assert np.allclose(store.get("a"), [1.0, 0.0])

    def test_dimension_mismatch_names_line(self, tmp_path):
        path = tmp_path / "vecs.txt"
        path.write_text("a 1.0 0.0\nb 1.0\n", encoding="utf-8")
        with pytest.raises(GloveFormatError) as exc:
            load_glove(str(path))
        assert exc.value.line_no == 2
        assert "line 2" in str(exc.value)

    def test_duplicate_token_keeps_first(self, tmp_path):
        path = tmp_path / "vecs.txt"
        path.write_text("a 1.0 0.0\na 0.5 0.5\n", encoding="utf-8")
        store = load_glove(str(path))
        assert store.vocab_size == 1
        assert np.allclose(store.get("a"), [1.0, 0.0])

    def test_case_insensitive_lookup_and_dedupe(self, tmp_path):
        path = tmp_path / "vecs.txt"
        path.write_text("The 1.0 0.0\nthe 0.0 1.0\n", encoding="utf-8")
        store = load_glove(str(path))
        assert store.vocab_size == 1
        assert np.allclose(store.get("THE"), [1.0, 0.0])

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "vecs.txt"
        path.write_text("a 1.0 nan\n", encoding="utf-8")
        with pytest.raises(GloveFormatError):
            load_glove(str(path))

    def test_unparseable_component_rejected(self, tmp_path):
        path = tmp_path / "vecs.txt"
        path.write_text("a 1.0 oops\n", encoding="utf-8")
        with pytest.raises(GloveFormatError):
            load_glove(str(path))

    def test_missing_file_is_io_error(self, tmp_path):
        with pytest.raises(OSError):
            load_glove(str(tmp_path / "absent.txt"))

    def test_gzip_transparent(self, tmp_path):
        path = tmp_path / "vecs.txt.gz"
        with gzip.open(path, "wt", encoding="utf-8") as fh:
            fh.write("a 1.0 0.0\n")
        store = load_glove(str(path))
        assert store.vocab_size == 1
        assert store.dimension == 2

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "vecs.txt"
        path.write_text("", encoding="utf-8")
        with pytest.raises(GloveFormatError):
            load_glove(str(path))


class TestSentenceEmbedding:
    @pytest.fixture
    def store(self):
        return EmbeddingStore({"a": [1.0, 0.0], "b": [0.0, 1.0]})

    def test_single_token_identity(self, store):
        assert np.allclose(sentence_embedding(store, ["a"]), [1.0, 0.0])

    def test_mean_of_two(self, store):
        assert np.allclose(sentence_embedding(store, ["a", "b"]), [0.5, 0.5])

    def test_all_oov_absent(self, store):
        assert sentence_embedding(store, ["zzz_oov"]) is None

    def test_empty_tokens_absent(self, store):
        assert sentence_embedding(store, []) is None

    def test_oov_tokens_skipped(self, store):
        assert np.allclose(sentence_embedding(store, ["a", "zzz"]), [1.0, 0.0])

    @given(st.permutations(["a", "b", "a", "zzz"]))
    def test_permutation_invariant(self, tokens):
        store = EmbeddingStore({"a": [1.0, 0.0], "b": [0.0, 1.0]})
        base = sentence_embedding(store, ["a", "b", "a", "zzz"])
        assert np.allclose(sentence_embedding(store, list(tokens)), base)


class TestCosine:
    def test_identical(self):
        assert cosine([1.0, 0.0], [1.0, 0.0]) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine([1.0, 0.0], [0.0, 1.0]) == pytest.approx(0.0)

    def test_forty_five_degrees(self):
        assert cosine([1.0, 1.0], [1.0, 0.0]) == pytest.approx(1.0 / math.sqrt(2), abs=1e-4)

    def test_zero_norm_is_zero(self):
        assert cosine([0.0, 0.0], [1.0, 2.0]) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            cosine([1.0, 0.0], [1.0, 0.0, 0.0])

    @given(vector_pairs())
    def test_symmetry(self, pair):
        u, v = pair
        assert cosine(u, v) == pytest.approx(cosine(v, u), abs=1e-12)

    @given(vector_pairs(), st.floats(min_value=1e-3, max_value=1e3))
    def test_scale_invariance(self, pair, c):
        u, v = pair
        scaled = [c * x for x in u]
        assert cosine(scaled, v) == pytest.approx(cosine(u, v), abs=1e-9)

    @given(vector_pairs())
    def test_range(self, pair):
        u, v = pair
        assert -1.0 - 1e-9 <= cosine(u, v) <= 1.0 + 1e-9


class TestEmbeddingStore:
    def test_constructor_validates_dimension(self):
        with pytest.raises(ValueError):
            EmbeddingStore({"a": [1.0, 0.0], "b": [1.0]})

    def test_constructor_rejects_non_finite(self):
        with pytest.raises(ValueError):
            EmbeddingStore({"a": [1.0, float("inf")]})

    def test_empty_store_rejected(self):
        with pytest.raises(ValueError):
            EmbeddingStore({})
