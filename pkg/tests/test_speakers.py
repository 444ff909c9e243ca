"""Embedding store, cosine similarity, interpolation, persona enumeration."""

from __future__ import annotations

import json

import numpy as np
import pytest

from afroforge.speakers import (
    EMBEDDING_DIM,
    EmbeddingError,
    EmbeddingStore,
    GroupConstraintError,
    PersonaSpec,
    SpeakerEmbedding,
    cosine_similarity,
    generate_personas,
    import_embeddings,
    interpolate,
    persona_id,
    write_embeddings,
    write_personas,
)


def basis(i: int) -> np.ndarray:
    v = np.zeros(EMBEDDING_DIM)
    v[i] = 1.0
    return v


def emb(speaker_id: str, vector, gender="female", country="NG",
        accent="yoruba") -> SpeakerEmbedding:
    return SpeakerEmbedding(speaker_id=speaker_id, vector=vector,
                            gender=gender, country=country, accent=accent)


def store_of(*embeddings: SpeakerEmbedding) -> EmbeddingStore:
    store = EmbeddingStore()
    for e in embeddings:
        store.add(e)
    return store


def random_unit(rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(EMBEDDING_DIM)
    return v / np.linalg.norm(v)


class TestImport:
    def write_lines(self, tmp_path, rows):
        path = tmp_path / "emb.jsonl"
        path.write_text("\n".join(json.dumps(r) for r in rows) + "\n",
                        encoding="utf-8")
        return path

    def row(self, speaker_id="s1", vector=None, **meta):
        return {
            "speaker_id": speaker_id,
            "gender": meta.get("gender", "female"),
            "country": meta.get("country", "NG"),
            "accent": meta.get("accent", "yoruba"),
            "vector": list(vector if vector is not None else basis(0)),
        }

    def test_three_valid(self, tmp_path):
        path = self.write_lines(tmp_path, [
            self.row(f"s{i}", basis(i)) for i in range(3)])
        assert len(import_embeddings(path)) == 3

    def test_wrong_dimension(self, tmp_path):
        path = self.write_lines(
            tmp_path, [self.row("s1", [1.0] + [0.0] * 127)])
        with pytest.raises(EmbeddingError, match=r"dimension 128 != 256"):
            import_embeddings(path)

    def test_renormalized_on_import(self, tmp_path):
        path = self.write_lines(tmp_path, [self.row("s1", 2.0 * basis(3))])
        store = import_embeddings(path)
        assert float(np.linalg.norm(store["s1"].vector)) == \
            pytest.approx(1.0, abs=1e-6)

    def test_non_finite_rejected(self, tmp_path):
        v = list(basis(0))
        v[5] = float("nan")
        path = self.write_lines(tmp_path, [self.row("s1", v)])
        with pytest.raises(EmbeddingError, match="non-finite"):
            import_embeddings(path)

    def test_duplicate_speaker_rejected(self, tmp_path):
        path = self.write_lines(tmp_path, [self.row("s1"), self.row("s1")])
        with pytest.raises(EmbeddingError, match="duplicate"):
            import_embeddings(path)

    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(0)
        store = store_of(*(emb(f"s{i}", random_unit(rng)) for i in range(4)))
        path = write_embeddings(store, tmp_path / "out.jsonl")
        loaded = import_embeddings(path)
        for original in store:
            np.testing.assert_allclose(
                loaded[original.speaker_id].vector, original.vector,
                atol=1e-12)


class TestCosine:
    def test_self_similarity_one(self):
        a = emb("a", basis(0))
        assert cosine_similarity(a, a) == 1.0

    def test_orthogonal_zero(self):
        assert cosine_similarity(emb("a", basis(0)), emb("b", basis(1))) == 0.0

    def test_hand_dot_product(self):
        v = np.zeros(EMBEDDING_DIM)
        v[0], v[1] = 0.6, 0.8
        assert cosine_similarity(emb("a", v), emb("b", basis(0))) == \
            pytest.approx(0.6, abs=1e-12)

    def test_symmetric(self):
        rng = np.random.default_rng(2)
        a, b = emb("a", random_unit(rng)), emb("b", random_unit(rng))
        assert cosine_similarity(a, b) == cosine_similarity(b, a)


class TestInterpolate:
    def test_alpha_one_returns_endpoint_exactly(self):
        rng = np.random.default_rng(9)
        store = store_of(emb("s1", random_unit(rng)),
                         emb("s2", random_unit(rng)))
        spec = PersonaSpec("p", ("s1", "s2"), (1.0, 0.0))
        out = interpolate(spec, store)
        np.testing.assert_array_equal(out.vector, store["s1"].vector)

    def test_alpha_zero_returns_other_endpoint(self):
        rng = np.random.default_rng(10)
        store = store_of(emb("s1", random_unit(rng)),
                         emb("s2", random_unit(rng)))
        out = interpolate(PersonaSpec("p", ("s1", "s2"), (0.0, 1.0)), store)
        np.testing.assert_array_equal(out.vector, store["s2"].vector)

    def test_orthonormal_pair_hand_value(self):
        store = store_of(emb("s1", basis(0)), emb("s2", basis(1)))
        out = interpolate(PersonaSpec("p", ("s1", "s2"), (0.5, 0.5)), store)
        # (0.5, 0.5) renormalized: 1/sqrt(2) on both axes.
        assert out.vector[0] == pytest.approx(0.70711, abs=1e-5)
        assert out.vector[1] == pytest.approx(0.70711, abs=1e-5)
        assert float(np.linalg.norm(out.vector)) == pytest.approx(1.0, 1e-9)

    def test_equal_weight_triple_hand_value(self):
        store = store_of(emb("s1", basis(0)), emb("s2", basis(1)),
                         emb("s3", basis(2)))
        third = 1.0 / 3.0
        out = interpolate(
            PersonaSpec("p", ("s1", "s2", "s3"), (third, third, third)),
            store)
        for axis in range(3):
            assert out.vector[axis] == pytest.approx(0.57735, abs=1e-5)

    def test_meta_inherited(self):
        store = store_of(
            emb("s1", basis(0), gender="male", country="KE", accent="swahili"),
            emb("s2", basis(1), gender="male", country="KE", accent="swahili"))
        out = interpolate(PersonaSpec("p", ("s1", "s2"), (0.5, 0.5)), store)
        assert (out.gender, out.country, out.accent) == \
            ("male", "KE", "swahili")

    def test_mixed_groups_rejected(self):
        store = store_of(emb("s1", basis(0), country="NG"),
                         emb("s2", basis(1), country="KE"))
        with pytest.raises(GroupConstraintError):
            interpolate(PersonaSpec("p", ("s1", "s2"), (0.5, 0.5)), store)

    def test_mixed_groups_override_flag(self):
        store = store_of(emb("s1", basis(0), country="NG"),
                         emb("s2", basis(1), country="KE"))
        out = interpolate(PersonaSpec("p", ("s1", "s2"), (0.7, 0.3)), store,
                          allow_mixed_groups=True)
        assert out.country == "NG"  # dominant-weight source

    def test_unknown_source_rejected(self):
        store = store_of(emb("s1", basis(0)))
        with pytest.raises(EmbeddingError, match="unknown"):
            interpolate(PersonaSpec("p", ("s1", "ghost"), (0.5, 0.5)), store)

    def test_symmetry_and_norm_on_random_pairs(self):
        rng = np.random.default_rng(123)
        for _ in range(200):
            store = store_of(emb("s1", random_unit(rng)),
                             emb("s2", random_unit(rng)))
            out = interpolate(
                PersonaSpec("p", ("s1", "s2"), (0.5, 0.5)), store)
            cos1 = cosine_similarity(out, store["s1"])
            cos2 = cosine_similarity(out, store["s2"])
            assert abs(cos1 - cos2) < 1e-6
            assert abs(float(np.linalg.norm(out.vector)) - 1.0) < 1e-6

    def test_blend_closer_than_sources(self):
        # For nonnegative source similarity the blend sits between them.
        rng = np.random.default_rng(77)
        done = 0
        while done < 50:
            s1, s2 = random_unit(rng), random_unit(rng)
            if float(np.dot(s1, s2)) < 0:
                continue
            store = store_of(emb("s1", s1), emb("s2", s2))
            out = interpolate(
                PersonaSpec("p", ("s1", "s2"), (0.5, 0.5)), store)
            assert cosine_similarity(out, store["s1"]) >= \
                cosine_similarity(store["s1"], store["s2"]) - 1e-12
            done += 1

    def test_weights_validation(self):
        with pytest.raises(EmbeddingError):
            PersonaSpec("p", ("a", "b"), (0.6, 0.6))
        with pytest.raises(EmbeddingError):
            PersonaSpec("p", ("a", "b"), (-0.1, 1.1))
        with pytest.raises(EmbeddingError):
            PersonaSpec("p", ("a",), (1.0,))
        with pytest.raises(EmbeddingError):
            PersonaSpec("p", ("a", "b", "c", "d"), (0.25,) * 4)


class TestGeneratePersonas:
    def group(self, n: int, accent: str, start: int) -> list[SpeakerEmbedding]:
        return [emb(f"s{start + i:02d}", basis(start + i), accent=accent)
                for i in range(n)]

    def test_single_speaker_group_empty(self):
        store = store_of(*self.group(1, "igbo", 0))
        assert generate_personas(store) == []

    def test_group_of_three_yields_four(self):
        store = store_of(*self.group(3, "igbo", 0))
        personas = generate_personas(store)
        assert len(personas) == 4  # C(3,2) + C(3,3)
        pair_specs = [p for p, _ in personas if len(p.sources) == 2]
        assert len(pair_specs) == 3

    def test_groups_never_cross(self):
        store = store_of(*self.group(2, "igbo", 0), *self.group(1, "hausa", 10))
        personas = generate_personas(store)
        assert len(personas) == 1
        assert personas[0][0].sources == ("s00", "s01")

    def test_counts_per_group_size(self):
        sizes = {1: 0, 2: 1, 3: 4, 4: 10}
        start = 0
        embeddings = []
        for size in sizes:
            embeddings.extend(self.group(size, f"accent{size}", start))
            start += size
        personas = generate_personas(store_of(*embeddings))
        assert len(personas) == sum(sizes.values())

    def test_deterministic_order_and_ids(self):
        store = store_of(*self.group(3, "igbo", 0))
        a = [p.new_speaker_id for p, _ in generate_personas(store)]
        b = [p.new_speaker_id for p, _ in generate_personas(store)]
        assert a == b
        assert a[0] == persona_id(("s00", "s01")) == "blend::s00+s01"

    def test_cap_truncates(self):
        store = store_of(*self.group(4, "igbo", 0))
        assert len(generate_personas(store, cap=3)) == 3

    def test_pairs_only_when_max_sources_two(self):
        store = store_of(*self.group(3, "igbo", 0))
        personas = generate_personas(store, max_sources=2)
        assert len(personas) == 3
        assert all(len(p.sources) == 2 for p, _ in personas)

    def test_persona_records_carry_provenance(self, tmp_path):
        store = store_of(*self.group(2, "igbo", 0))
        personas = generate_personas(store)
        path = write_personas(personas, tmp_path / "personas.jsonl")
        row = json.loads(path.read_text().splitlines()[0])
        assert row["sources"] == ["s00", "s01"]
        assert row["renormalized"] is True
        assert row["weights"] == [0.5, 0.5]
        assert len(row["vector"]) == EMBEDDING_DIM
