"""Objective evaluation metrics: WER, EER, MOS aggregation, bootstrap.

Conventions fixed here for reproducibility:

* WER normalizes both sides identically (lowercase, punctuation
  stripped, whitespace tokens) before a uniform-cost alignment.
* EER sweeps thresholds at midpoints between observed scores and
  linearly interpolates between adjacent operating points when the
  false-accept and false-reject curves have no exact crossing.
* MOS confidence intervals are normal-approximation 1.96 * s / sqrt(n).
* Bootstrap CIs are percentile intervals over counter-based per-resample
  RNG streams, so results are seed-deterministic no matter how the
  resampling loop is scheduled.
"""

from __future__ import annotations

import math
import statistics
import string
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


class MetricError(ValueError):
    """Raised when a metric precondition is violated."""


def default_text_norm(text: str) -> str:
    """Lowercase and strip punctuation; the default WER normalizer."""
    return text.lower().translate(_PUNCT_TABLE)


@dataclass(frozen=True)
class WerBreakdown:
    substitutions: int
    deletions: int
    insertions: int
    ref_words: int

    @property
    def wer(self) -> float:
        return (self.substitutions + self.deletions
                + self.insertions) / self.ref_words


@dataclass(frozen=True)
class ScoreTrials:
    """Verification scores for genuine and impostor trials."""

    genuine: tuple[float, ...]
    impostor: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "genuine", tuple(float(s) for s in self.genuine))
        object.__setattr__(self, "impostor", tuple(float(s) for s in self.impostor))
        if not self.genuine or not self.impostor:
            raise MetricError("both trial lists must be non-empty")
        for s in self.genuine + self.impostor:
            if not math.isfinite(s):
                raise MetricError(f"non-finite score {s}")


@dataclass(frozen=True)
class MosSummary:
    n: int
    mean: float
    ci95_half_width: float


@dataclass(frozen=True)
class BootstrapResult:
    mean_diff: float
    ci_low: float
    ci_high: float
    significant: bool


@dataclass(frozen=True)
class LeaderboardEntry:
    model: str
    wins: int
    rank: int


def wer(ref: str, hyp: str,
        norm: Callable[[str], str] = default_text_norm) -> WerBreakdown:
    """Word error rate from a minimum-edit alignment of normalized text.

    Substitutions, deletions and insertions all cost 1. When several
    alignments share the minimum cost, ties resolve match/substitution
    first, then deletion, then insertion.

    Raises:
        MetricError: reference is empty after normalization.
    """
    ref_words = norm(ref).split()
    hyp_words = norm(hyp).split()
    if not ref_words:
        raise MetricError("reference is empty after normalization")

    n, m = len(ref_words), len(hyp_words)
    # dist[i][j]: cost of aligning ref[:i] with hyp[:j]
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i
    for j in range(1, m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            sub = dist[i - 1][j - 1] + (ref_words[i - 1] != hyp_words[j - 1])
            dele = dist[i - 1][j] + 1
            ins = dist[i][j - 1] + 1
            dist[i][j] = min(sub, dele, ins)

    subs = dels = inss = 0
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dist[i][j] == dist[i - 1][j - 1] + (
                ref_words[i - 1] != hyp_words[j - 1]):
            subs += ref_words[i - 1] != hyp_words[j - 1]
            i, j = i - 1, j - 1
        elif i > 0 and dist[i][j] == dist[i - 1][j] + 1:
            dels += 1
            i -= 1
        else:
            inss += 1
            j -= 1
    return WerBreakdown(substitutions=subs, deletions=dels,
                        insertions=inss, ref_words=n)


def _operating_points(trials: ScoreTrials) -> tuple[np.ndarray, np.ndarray]:
    """(FAR, FRR) at thresholds below, between and above observed scores."""
    gen = np.asarray(trials.genuine, dtype=np.float64)
    imp = np.asarray(trials.impostor, dtype=np.float64)
    pooled = np.unique(np.concatenate([gen, imp]))
    thresholds = np.concatenate([
        [pooled[0] - 1.0],
        (pooled[:-1] + pooled[1:]) / 2.0,
        [pooled[-1] + 1.0],
    ])
    far = (imp[None, :] >= thresholds[:, None]).mean(axis=1)
    frr = (gen[None, :] < thresholds[:, None]).mean(axis=1)
    return far, frr


def eer(trials: ScoreTrials) -> float:
    """Equal error rate of a verification score sweep, in [0, 1]."""
    far, frr = _operating_points(trials)
    diff = far - frr  # starts at +1, ends at -1, non-increasing
    for k in range(len(diff)):
        if diff[k] <= 0.0:
            if diff[k] == 0.0:
                return float(far[k])
            lam = diff[k - 1] / (diff[k - 1] - diff[k])
            return float(far[k - 1] + lam * (far[k] - far[k - 1]))
    raise AssertionError("FAR/FRR sweep has no crossing")  # pragma: no cover


def aggregate_mos(ratings: Sequence[int]) -> MosSummary:
    """Mean and normal-approximation 95 % CI half-width of Likert ratings.

    Raises:
        MetricError: empty input, non-integer rating, or value outside 1..5.
    """
    if not ratings:
        raise MetricError("no ratings to aggregate")
    for r in ratings:
        if isinstance(r, bool) or not isinstance(r, int):
            raise MetricError(f"rating {r!r} is not an integer")
        if not 1 <= r <= 5:
            raise MetricError(f"rating {r} outside Likert range 1..5")
    n = len(ratings)
    mean = statistics.fmean(ratings)
    s = statistics.stdev(ratings) if n > 1 else 0.0
    return MosSummary(n=n, mean=mean,
                      ci95_half_width=1.96 * s / math.sqrt(n))


def _resample_rng(seed: int, index: int) -> np.random.Generator:
    # Each resample owns a disjoint Philox counter block, so the stream
    # assignment is independent of execution order or worker count.
    return np.random.Generator(np.random.Philox(key=seed, counter=index << 128))


def bootstrap_diff(a: Sequence[float], b: Sequence[float],
                   resamples: int = 10000, seed: int = 0) -> BootstrapResult:
    """Percentile-bootstrap CI on mean(a) - mean(b).

    significant is True iff the 95 % CI excludes zero. Deterministic for
    a given seed.

    Raises:
        MetricError: empty input or resamples < 1000.
    """
    if not len(a) or not len(b):
        raise MetricError("both samples must be non-empty")
    if resamples < 1000:
        raise MetricError(f"resamples must be >= 1000, got {resamples}")
    xa = np.asarray(a, dtype=np.float64)
    xb = np.asarray(b, dtype=np.float64)
    diffs = np.empty(resamples, dtype=np.float64)
    for i in range(resamples):
        rng = _resample_rng(seed, i)
        ia = rng.integers(0, len(xa), len(xa))
        ib = rng.integers(0, len(xb), len(xb))
        diffs[i] = xa[ia].mean() - xb[ib].mean()
    ci_low, ci_high = np.percentile(diffs, [2.5, 97.5])
    return BootstrapResult(
        mean_diff=float(xa.mean() - xb.mean()),
        ci_low=float(ci_low),
        ci_high=float(ci_high),
        significant=bool(ci_low > 0.0 or ci_high < 0.0),
    )


def preference_ranking(votes: Mapping[str, int]) -> list[LeaderboardEntry]:
    """Order models by descending win count; ties share a rank."""
    ordered = sorted(votes.items(), key=lambda kv: (-kv[1], kv[0]))
    entries = []
    for model, wins in ordered:
        rank = 1 + sum(1 for w in votes.values() if w > wins)
        entries.append(LeaderboardEntry(model=model, wins=wins, rank=rank))
    return entries


def corpus_wer(pairs: Iterable[tuple[str, str]],
               norm: Callable[[str], str] = default_text_norm) -> WerBreakdown:
    """Pooled WER over (ref, hyp) pairs: error and word counts summed."""
    subs = dels = inss = words = 0
    for ref, hyp in pairs:
        b = wer(ref, hyp, norm)
        subs += b.substitutions
        dels += b.deletions
        inss += b.insertions
        words += b.ref_words
    if words == 0:
        raise MetricError("no reference words")
    return WerBreakdown(subs, dels, inss, words)
