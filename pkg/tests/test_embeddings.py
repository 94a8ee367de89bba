import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reliefmatch.embeddings import (
    EmbeddingTable,
    average_vector,
    cosine,
    load_vectors,
    save_vectors,
)

finite_floats = st.floats(min_value=-100, max_value=100, allow_nan=False)


class TestLoad:
    def test_header_and_rows(self, tmp_path):
        p = tmp_path / "vec.txt"
        p.write_text("2 3\nalpha 1 2 3\nbeta 0.5 -1 0\n")
        table = load_vectors(p)
        assert table.dimension == 3
        assert set(table.vectors) == {"alpha", "beta"}

    def test_dimension_mismatch_fatal_with_line(self, tmp_path):
        p = tmp_path / "vec.txt"
        p.write_text("2 3\nalpha 1 2 3\nbeta 1 2\n")
        with pytest.raises(ValueError, match=":3:"):
            load_vectors(p)

    def test_duplicate_token_keeps_first(self, tmp_path):
        p = tmp_path / "vec.txt"
        p.write_text("2 2\ntok 1 0\ntok 0 1\n")
        assert load_vectors(p).vectors["tok"] == [1.0, 0.0]

    def test_empty_file_fatal(self, tmp_path):
        p = tmp_path / "vec.txt"
        p.write_text("0 3\n")
        with pytest.raises(ValueError, match="no vectors"):
            load_vectors(p)

    def test_nan_rejected(self, tmp_path):
        p = tmp_path / "vec.txt"
        p.write_text("1 2\ntok nan 0\n")
        with pytest.raises(ValueError, match="non-finite"):
            load_vectors(p)

    def test_flavor_recorded(self, fixtures_dir):
        table = load_vectors(fixtures_dir / "vectors_crisis.txt", flavor="pretrained_crisis")
        assert table.flavor == "pretrained_crisis"
        assert table.dimension == 8

    def test_unknown_flavor_rejected(self, fixtures_dir):
        with pytest.raises(ValueError):
            load_vectors(fixtures_dir / "vectors_crisis.txt", flavor="bogus")

    def test_roundtrip_six_decimals(self, tmp_path):
        table = EmbeddingTable(
            2, {"a": [0.1234567, -1.0], "b": [2.5, 0.000001]}, flavor="local"
        )
        p = tmp_path / "vec.txt"
        save_vectors(table, p)
        back = load_vectors(p)
        assert set(back.vectors) == {"a", "b"}
        for tok in table.vectors:
            for x, y in zip(table.vectors[tok], back.vectors[tok]):
                assert y == pytest.approx(x, abs=5e-7)


class TestAverage:
    def test_single_token_identity(self):
        t = EmbeddingTable(2, {"x": [1.0, 2.0]})
        assert average_vector(["x"], t) == [1.0, 2.0]

    def test_opposite_vectors_cancel(self):
        t = EmbeddingTable(2, {"x": [1.0, 2.0], "y": [-1.0, -2.0]})
        assert average_vector(["x", "y"], t) == [0.0, 0.0]

    def test_all_oov_absent(self):
        t = EmbeddingTable(2, {"x": [1.0, 2.0]})
        assert average_vector(["nope", "nada"], t) is None

    def test_lowercase_fallback(self):
        t = EmbeddingTable(1, {"nepal": [1.0]})
        assert average_vector(["Nepal"], t) == [1.0]

    def test_case_sensitive_first(self):
        t = EmbeddingTable(1, {"Nepal": [2.0], "nepal": [1.0]})
        assert average_vector(["Nepal"], t) == [2.0]

    @given(st.permutations(["a", "b", "c", "a"]))
    @settings(max_examples=24, deadline=None)
    def test_order_invariant(self, tokens):
        t = EmbeddingTable(2, {"a": [1.0, 0.0], "b": [0.0, 1.0], "c": [1.0, 1.0]})
        assert average_vector(tokens, t) == average_vector(sorted(tokens), t)


class TestCosine:
    def test_self_similarity(self):
        assert cosine([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_hand_computed_oracle(self):
        assert cosine([1, 2, 3], [4, 5, 6]) == pytest.approx(0.974631846, abs=1e-9)

    def test_zero_norm_is_zero(self):
        assert cosine([0.0, 0.0], [1.0, 2.0]) == 0.0

    def test_dimension_mismatch_fatal(self):
        with pytest.raises(ValueError):
            cosine([1.0], [1.0, 2.0])

    def test_scaling_invariance(self):
        v = [0.3, -1.2, 4.0]
        assert cosine([3 * x for x in v], v) == pytest.approx(1.0)

    @given(
        st.lists(finite_floats, min_size=3, max_size=3),
        st.lists(finite_floats, min_size=3, max_size=3),
    )
    @settings(max_examples=300, deadline=None)
    def test_symmetric_and_bounded(self, a, b):
        assert cosine(a, b) == pytest.approx(cosine(b, a), abs=1e-12)
        assert abs(cosine(a, b)) <= 1.0 + 1e-12

    def test_random_against_bruteforce_oracle(self):
        import random

        rng = random.Random(7)
        for _ in range(50):
            dim = rng.randint(1, 16)
            a = [rng.uniform(-5, 5) for _ in range(dim)]
            b = [rng.uniform(-5, 5) for _ in range(dim)]
            dot = sum(x * y for x, y in zip(a, b))
            na = math.sqrt(sum(x * x for x in a))
            nb = math.sqrt(sum(y * y for y in b))
            want = 0.0 if na == 0 or nb == 0 else dot / (na * nb)
            assert cosine(a, b) == pytest.approx(want, abs=1e-9)
