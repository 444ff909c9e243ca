"""Deterministic corpus partitioning and per-speaker duration balancing.

Test samples come only from (speaker, accent) groups holding strictly
more than the configured minutes of audio, drawn round-robin across
groups so every well-resourced accent is covered; the dev set is a
seeded uniform sample of the remainder. Balancing repeats a
short-on-data speaker's entire sample set (never a partial subset)
until the speaker reaches the duration target, accepting overshoot.

Replica records are distinguished by a reserved "#r<k>" utterance-id
suffix; `source_utterance_id` recovers the lineage.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, replace

from .corpus import Manifest, UtteranceRecord

_REPLICA_RE = re.compile(r"^(?P<source>.*)#r(?P<index>\d+)$")


class SplitError(ValueError):
    """Raised when a split request cannot be satisfied."""


class BalanceError(ValueError):
    """Raised when balancing preconditions fail."""


@dataclass(frozen=True)
class SplitConfig:
    test_min_group_minutes: float = 20.0
    test_size: int = 736
    dev_size: int = 200
    seed: int = 0

    def __post_init__(self) -> None:
        if self.test_size < 0 or self.dev_size < 0:
            raise SplitError("split sizes must be >= 0")
        if self.test_min_group_minutes <= 0:
            raise SplitError("test_min_group_minutes must be > 0")


@dataclass(frozen=True)
class BalanceConfig:
    target_minutes_per_speaker: float = 10.0

    def __post_init__(self) -> None:
        if self.target_minutes_per_speaker <= 0:
            raise BalanceError("target must be > 0")


@dataclass(frozen=True)
class SplitResult:
    train: Manifest
    dev: Manifest
    test: Manifest
    report: dict


def replica_id(source_id: str, index: int) -> str:
    return f"{source_id}#r{index}"


def source_utterance_id(utterance_id: str) -> str:
    """Strip a replica suffix, if any, recovering the source lineage."""
    m = _REPLICA_RE.match(utterance_id)
    return m.group("source") if m else utterance_id


def replica_index(utterance_id: str) -> int:
    m = _REPLICA_RE.match(utterance_id)
    return int(m.group("index")) if m else 0


def make_splits(manifest: Manifest, cfg: SplitConfig) -> SplitResult:
    """Partition a manifest into disjoint, covering train/dev/test sets.

    Deterministic given (manifest, config, seed). Output manifests keep
    the input's record order; only membership is randomized.

    Raises:
        SplitError: test_size exceeds the samples available in eligible
            groups, or dev_size exceeds the remainder.
    """
    rng = random.Random(cfg.seed)

    groups: dict[tuple[str, str], list[UtteranceRecord]] = {}
    for rec in manifest:
        groups.setdefault((rec.speaker_id, rec.accent), []).append(rec)
    min_seconds = cfg.test_min_group_minutes * 60.0
    eligible_keys = sorted(
        key for key, recs in groups.items()
        if sum(r.duration_s for r in recs) > min_seconds
    )

    queues = []
    for key in eligible_keys:
        q = list(groups[key])
        rng.shuffle(q)
        queues.append((key, q))
    available = sum(len(q) for _, q in queues)
    if cfg.test_size > available:
        raise SplitError(
            f"test_size {cfg.test_size} exceeds {available} samples in "
            f"groups over {cfg.test_min_group_minutes} minutes")

    test_ids: set[str] = set()
    group_test_counts = {key: 0 for key, _ in queues}
    depth = 0
    while len(test_ids) < cfg.test_size:
        took_any = False
        for key, q in queues:
            if len(test_ids) >= cfg.test_size:
                break
            if depth < len(q):
                test_ids.add(q[depth].utterance_id)
                group_test_counts[key] += 1
                took_any = True
        if not took_any:
            break
        depth += 1

    remainder = [r for r in manifest if r.utterance_id not in test_ids]
    if cfg.dev_size > len(remainder):
        raise SplitError(
            f"dev_size {cfg.dev_size} exceeds remaining {len(remainder)} samples")
    dev_ids = {
        remainder[i].utterance_id
        for i in rng.sample(range(len(remainder)), cfg.dev_size)
    }

    def pick(member: set[str]) -> Manifest:
        return Manifest(
            records=tuple(r for r in manifest if r.utterance_id in member),
            source_uri=manifest.source_uri,
        )

    train_ids = {r.utterance_id for r in remainder} - dev_ids
    report = {
        "seed": cfg.seed,
        "test_min_group_minutes": cfg.test_min_group_minutes,
        "eligible_groups": len(eligible_keys),
        "group_test_counts": {
            f"{spk}/{accent}": n
            for (spk, accent), n in sorted(group_test_counts.items())
        },
        "sizes": {
            "train": len(train_ids),
            "dev": len(dev_ids),
            "test": len(test_ids),
        },
    }
    return SplitResult(
        train=pick(train_ids), dev=pick(dev_ids), test=pick(test_ids),
        report=report,
    )


def balance_duplicate(train: Manifest,
                      cfg: BalanceConfig) -> tuple[Manifest, dict]:
    """Duplicate under-target speakers' full sample sets up to the target.

    A speaker whose total duration d falls short of the target gets
    ceil(target / d) total copies of every sample; speakers at or above
    the target are untouched. Originals keep their ids; copy k carries
    the "#r<k>" suffix.

    Raises:
        BalanceError: a speaker's total duration is zero.
    """
    target_s = cfg.target_minutes_per_speaker * 60.0
    totals: dict[str, float] = {}
    for rec in train:
        totals[rec.speaker_id] = totals.get(rec.speaker_id, 0.0) + rec.duration_s
    multipliers: dict[str, int] = {}
    for speaker, total in totals.items():
        if total <= 0:
            raise BalanceError(f"speaker {speaker!r} has zero total duration")
        multipliers[speaker] = (
            math.ceil(target_s / total) if total < target_s else 1)

    records = list(train.records)
    for speaker in sorted(multipliers):
        for k in range(1, multipliers[speaker]):
            records.extend(
                replace(rec, utterance_id=replica_id(rec.utterance_id, k))
                for rec in train if rec.speaker_id == speaker
            )
    report = {
        "target_minutes_per_speaker": cfg.target_minutes_per_speaker,
        "multipliers": dict(sorted(multipliers.items())),
    }
    return Manifest(records=tuple(records), source_uri=train.source_uri), report
