"""Speaker embedding store, similarity, and persona interpolation.

New personas are convex combinations of existing speaker embeddings,
restricted to sources sharing gender, country, and accent. Blends are
re-normalized to unit length because every consumer of the store expects
unit vectors; the raw weighted sum of non-parallel unit vectors is
shorter. Each persona record carries that fact (`renormalized: true`)
plus its source ids and weights for auditability.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterator

import numpy as np

EMBEDDING_DIM = 256
NORM_TOLERANCE = 1e-4

PERSONA_ID_PREFIX = "blend::"
PERSONA_ID_SEPARATOR = "+"


class EmbeddingError(ValueError):
    """Raised for malformed embeddings or store violations."""


class GroupConstraintError(EmbeddingError):
    """Raised when interpolation sources mix gender, country, or accent."""


@dataclass(frozen=True)
class SpeakerEmbedding:
    """A unit-norm voice-identity vector with its speaker metadata."""

    speaker_id: str
    vector: np.ndarray
    gender: str
    country: str
    accent: str

    def __post_init__(self) -> None:
        # Private copy: freezing an aliased input would make the
        # caller's own array read-only.
        vec = np.array(self.vector, dtype=np.float64)
        if vec.shape != (EMBEDDING_DIM,):
            raise EmbeddingError(
                f"dimension {vec.size} != {EMBEDDING_DIM} "
                f"for speaker {self.speaker_id!r}")
        if not np.all(np.isfinite(vec)):
            raise EmbeddingError(
                f"non-finite component in embedding {self.speaker_id!r}")
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise EmbeddingError(
                f"embedding {self.speaker_id!r} has norm {norm:.6f}, "
                f"expected 1 +/- {NORM_TOLERANCE}")
        vec.setflags(write=False)
        object.__setattr__(self, "vector", vec)

    @property
    def meta(self) -> tuple[str, str, str]:
        return (self.gender, self.country, self.accent)


@dataclass(frozen=True)
class PersonaSpec:
    """Recipe for a blended persona: source speakers and their weights."""

    new_speaker_id: str
    sources: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if not 2 <= len(self.sources) <= 3:
            raise EmbeddingError(
                f"persona needs 2 or 3 sources, got {len(self.sources)}")
        if len(self.weights) != len(self.sources):
            raise EmbeddingError("one weight per source required")
        if len(set(self.sources)) != len(self.sources):
            raise EmbeddingError(f"duplicate sources in {self.sources}")
        # Endpoint weights (0 on a source) are admitted so alpha in {0, 1}
        # degenerates to an exact copy of one source.
        if any(w < 0 for w in self.weights) or max(self.weights) == 0:
            raise EmbeddingError(f"weights must be nonnegative with at "
                                 f"least one positive, got {self.weights}")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise EmbeddingError(
                f"weights must sum to 1, got sum {sum(self.weights)!r}")


class EmbeddingStore:
    """Insertion-ordered, read-only-after-import speaker embedding index."""

    def __init__(self) -> None:
        self._by_id: dict[str, SpeakerEmbedding] = {}

    def add(self, emb: SpeakerEmbedding) -> None:
        if emb.speaker_id in self._by_id:
            raise EmbeddingError(f"duplicate speaker_id {emb.speaker_id!r}")
        self._by_id[emb.speaker_id] = emb

    def __len__(self) -> int:
        return len(self._by_id)

    def __contains__(self, speaker_id: str) -> bool:
        return speaker_id in self._by_id

    def __getitem__(self, speaker_id: str) -> SpeakerEmbedding:
        try:
            return self._by_id[speaker_id]
        except KeyError:
            raise EmbeddingError(f"unknown speaker_id {speaker_id!r}") from None

    def __iter__(self) -> Iterator[SpeakerEmbedding]:
        return iter(self._by_id.values())

    def groups(self) -> dict[tuple[str, str, str], list[str]]:
        """Speaker ids per (gender, country, accent), ids sorted."""
        out: dict[tuple[str, str, str], list[str]] = {}
        for emb in self:
            out.setdefault(emb.meta, []).append(emb.speaker_id)
        for ids in out.values():
            ids.sort()
        return out


def import_embeddings(path: str | Path) -> EmbeddingStore:
    """Load a JSONL embedding file, re-normalizing every vector.

    Each line: {"speaker_id", "gender", "country", "accent",
    "vector": [256 floats]}.

    Raises:
        EmbeddingError: wrong dimension, non-finite component, zero
            vector, or duplicate speaker_id (line numbers included).
    """
    store = EmbeddingStore()
    with Path(path).open(encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise EmbeddingError(
                    f"malformed JSON on line {line_no}: {exc}") from exc
            vec = np.asarray(raw.get("vector", ()), dtype=np.float64)
            if vec.shape != (EMBEDDING_DIM,):
                raise EmbeddingError(
                    f"dimension {vec.size} != {EMBEDDING_DIM} on line {line_no}")
            if not np.all(np.isfinite(vec)):
                raise EmbeddingError(f"non-finite component on line {line_no}")
            norm = float(np.linalg.norm(vec))
            if norm == 0.0:
                raise EmbeddingError(f"zero vector on line {line_no}")
            try:
                store.add(SpeakerEmbedding(
                    speaker_id=str(raw["speaker_id"]),
                    vector=vec / norm,
                    gender=str(raw.get("gender", "unspecified")),
                    country=str(raw.get("country", "")),
                    accent=str(raw.get("accent", "")),
                ))
            except KeyError as exc:
                raise EmbeddingError(
                    f"missing field {exc} on line {line_no}") from exc
    return store


def write_embeddings(store: EmbeddingStore, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for emb in store:
            f.write(json.dumps({
                "speaker_id": emb.speaker_id,
                "gender": emb.gender,
                "country": emb.country,
                "accent": emb.accent,
                "vector": [float(v) for v in emb.vector],
            }) + "\n")
    return path


def cosine_similarity(a: SpeakerEmbedding, b: SpeakerEmbedding) -> float:
    """Dot product of two unit-norm embeddings; symmetric, in [-1, 1]."""
    return float(np.dot(a.vector, b.vector))


def interpolate(spec: PersonaSpec, store: EmbeddingStore,
                allow_mixed_groups: bool = False) -> SpeakerEmbedding:
    """Blend source embeddings per the recipe's weights; unit-norm output.

    A weight of exactly 1 returns that source's vector unchanged. Mixed
    (gender, country, accent) sources are rejected unless
    allow_mixed_groups is set, in which case the highest-weight source's
    metadata is inherited.

    Raises:
        EmbeddingError: unknown source id or degenerate (cancelling) blend.
        GroupConstraintError: sources span different metadata groups.
    """
    sources = [store[sid] for sid in spec.sources]
    metas = {s.meta for s in sources}
    if len(metas) > 1 and not allow_mixed_groups:
        raise GroupConstraintError(
            f"sources mix (gender, country, accent) groups: {sorted(metas)}")
    dominant = min(range(len(sources)), key=lambda i: (-spec.weights[i], i))
    meta = sources[dominant].meta if allow_mixed_groups else sources[0].meta

    if max(spec.weights) == 1.0:
        vector = sources[spec.weights.index(1.0)].vector.copy()
    else:
        blended = np.zeros(EMBEDDING_DIM, dtype=np.float64)
        for w, src in zip(spec.weights, sources):
            blended += w * src.vector
        norm = float(np.linalg.norm(blended))
        if norm < 1e-9:
            raise EmbeddingError(
                f"blend of {spec.sources} cancels to the zero vector")
        vector = blended / norm
    return SpeakerEmbedding(
        speaker_id=spec.new_speaker_id,
        vector=vector,
        gender=meta[0], country=meta[1], accent=meta[2],
    )


def persona_id(sources: tuple[str, ...]) -> str:
    return PERSONA_ID_PREFIX + PERSONA_ID_SEPARATOR.join(sorted(sources))


def generate_personas(
    store: EmbeddingStore,
    max_sources: int = 3,
    alpha: float = 0.5,
    cap: int | None = None,
) -> list[tuple[PersonaSpec, SpeakerEmbedding]]:
    """Enumerate blended personas within each (gender, country, accent) group.

    All 2-subsets come first (weights alpha, 1 - alpha over the sorted
    pair), then all 3-subsets with equal weights; groups are visited in
    sorted key order and enumeration is lexicographic in speaker id, so
    output is deterministic. Groups of size 1 contribute nothing and
    cross-group pairs never occur.

    Args:
        cap: stop after this many personas (None = no limit).
    """
    if not 2 <= max_sources <= 3:
        raise EmbeddingError(f"max_sources must be 2 or 3, got {max_sources}")
    if not 0.0 < alpha < 1.0:
        raise EmbeddingError(f"alpha must be in (0, 1), got {alpha}")
    out: list[tuple[PersonaSpec, SpeakerEmbedding]] = []
    groups = store.groups()
    for key in sorted(groups):
        ids = groups[key]
        subsets: list[tuple[tuple[str, ...], tuple[float, ...]]] = [
            (pair, (alpha, 1.0 - alpha)) for pair in combinations(ids, 2)
        ]
        if max_sources == 3:
            third = 1.0 / 3.0
            subsets.extend(
                (triple, (third, third, third))
                for triple in combinations(ids, 3)
            )
        for sources, weights in subsets:
            if cap is not None and len(out) >= cap:
                return out
            spec = PersonaSpec(
                new_speaker_id=persona_id(sources),
                sources=sources,
                weights=weights,
            )
            out.append((spec, interpolate(spec, store)))
    return out


def write_personas(
    personas: list[tuple[PersonaSpec, SpeakerEmbedding]],
    path: str | Path,
) -> Path:
    """Persist personas in the embedding schema plus provenance fields."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for spec, emb in personas:
            f.write(json.dumps({
                "speaker_id": emb.speaker_id,
                "gender": emb.gender,
                "country": emb.country,
                "accent": emb.accent,
                "vector": [float(v) for v in emb.vector],
                "sources": list(spec.sources),
                "weights": list(spec.weights),
                "renormalized": True,
            }) + "\n")
    return path


def unit_vector(values: "np.typing.ArrayLike") -> np.ndarray:
    """Normalize an arbitrary 256-vector onto the unit sphere."""
    vec = np.asarray(values, dtype=np.float64)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0 or not math.isfinite(norm):
        raise EmbeddingError("cannot normalize zero or non-finite vector")
    return vec / norm
