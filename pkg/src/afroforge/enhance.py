"""Enhancement chain orchestration through external adapters.

An adapter is either a subprocess (command line parsed with shlex) that
reads a WAV on stdin and writes its result on stdout, or an HTTP
endpoint (URL starting with http:// or https://) that accepts WAV bytes
via POST and returns the same. Audio adapters answer with WAV bytes;
estimator-style adapters answer with one JSON line such as
{"score": 3.2} or {"vector": [...]}. Restorers take the mode as a
trailing argument (subprocess) or a ?mode= query parameter (HTTP).

Per utterance the chain is: denoise, restore the denoised audio in
modes 0-2, score every produced candidate, keep the best. A failed
restore mode leaves a gap, never kills the set; a failed denoise kills
only that utterance.
"""

from __future__ import annotations

import concurrent.futures
import io
import json
import logging
import math
import shlex
import subprocess
import urllib.error
import urllib.parse
import urllib.request
import wave
from dataclasses import dataclass, replace as dc_replace
from pathlib import Path
from typing import Mapping

from .corpus import Manifest, UtteranceRecord

logger = logging.getLogger(__name__)

ADAPTER_KINDS = ("denoiser", "restorer", "quality_estimator", "asr", "embedder")
CANDIDATE_LABELS = ("denoised", "mode0", "mode1", "mode2")
RESTORE_MODES = (0, 1, 2)


class AdapterError(RuntimeError):
    """Adapter invocation failed (nonzero exit, bad payload, HTTP error)."""


class AdapterTimeout(AdapterError):
    """Adapter exceeded its configured timeout."""


class EnhancementError(RuntimeError):
    """The candidate set for an utterance could not be built."""


class SelectionError(RuntimeError):
    """No scored candidate to select from."""


@dataclass(frozen=True)
class EnhancerAdapter:
    name: str
    kind: str
    endpoint: str
    timeout_s: float = 60.0

    def __post_init__(self) -> None:
        if self.kind not in ADAPTER_KINDS:
            raise ValueError(f"unknown adapter kind {self.kind!r}")
        if self.timeout_s <= 0:
            raise ValueError(f"timeout_s must be > 0, got {self.timeout_s}")
        if not self.endpoint:
            raise ValueError(f"adapter {self.name!r} has an empty endpoint")

    @property
    def is_http(self) -> bool:
        return self.endpoint.startswith(("http://", "https://"))


class AdapterRegistry:
    """Immutable-after-load set of adapters, unique by name."""

    def __init__(self, adapters: list[EnhancerAdapter]):
        self._by_name: dict[str, EnhancerAdapter] = {}
        for a in adapters:
            if a.name in self._by_name:
                raise ValueError(f"duplicate adapter name {a.name!r}")
            self._by_name[a.name] = a

    def __iter__(self):
        return iter(self._by_name.values())

    def __len__(self) -> int:
        return len(self._by_name)

    def require(self, kind: str) -> EnhancerAdapter:
        found = [a for a in self if a.kind == kind]
        if not found:
            raise ValueError(f"registry has no {kind!r} adapter")
        if len(found) > 1:
            raise ValueError(
                f"registry has {len(found)} {kind!r} adapters; expected one")
        return found[0]


def load_registry(path: str | Path) -> AdapterRegistry:
    """Read an adapter registry from a JSON list of adapter objects."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise ValueError("adapter registry must be a JSON list")
    return AdapterRegistry([
        EnhancerAdapter(
            name=str(item["name"]),
            kind=str(item["kind"]),
            endpoint=str(item["endpoint"]),
            timeout_s=float(item.get("timeout_s", 60.0)),
        )
        for item in raw
    ])


@dataclass(frozen=True)
class Candidate:
    label: str
    path: Path
    predicted_mos: float | None = None


@dataclass(frozen=True)
class EnhancementCandidateSet:
    """Per-utterance enhancement outputs in canonical label order."""

    utterance_id: str
    candidates: tuple[Candidate, ...]
    absent: Mapping[str, str] | None = None  # label -> failure reason

    def __post_init__(self) -> None:
        object.__setattr__(self, "absent", dict(self.absent or {}))
        labels = [c.label for c in self.candidates]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate candidate labels: {labels}")
        order = [label for label in CANDIDATE_LABELS if label in labels]
        if labels != order:
            raise ValueError(f"candidates out of canonical order: {labels}")
        for c in self.candidates:
            if c.predicted_mos is not None and not math.isfinite(c.predicted_mos):
                raise ValueError(f"non-finite score on {c.label}")


def _invoke(adapter: EnhancerAdapter, payload: bytes,
            mode: int | None = None) -> bytes:
    if adapter.is_http:
        url = adapter.endpoint
        if mode is not None:
            sep = "&" if urllib.parse.urlparse(url).query else "?"
            url = f"{url}{sep}mode={mode}"
        req = urllib.request.Request(
            url, data=payload, method="POST",
            headers={"Content-Type": "audio/wav"})
        try:
            with urllib.request.urlopen(req, timeout=adapter.timeout_s) as resp:
                return resp.read()
        except urllib.error.HTTPError as exc:
            raise AdapterError(
                f"adapter {adapter.name!r} returned HTTP {exc.code}") from exc
        except urllib.error.URLError as exc:
            if isinstance(exc.reason, TimeoutError):
                raise AdapterTimeout(
                    f"adapter {adapter.name!r} timed out "
                    f"after {adapter.timeout_s}s") from exc
            raise AdapterError(
                f"adapter {adapter.name!r} unreachable: {exc.reason}") from exc
        except TimeoutError as exc:
            raise AdapterTimeout(
                f"adapter {adapter.name!r} timed out "
                f"after {adapter.timeout_s}s") from exc
    args = shlex.split(adapter.endpoint)
    if mode is not None:
        args.append(str(mode))
    try:
        proc = subprocess.run(
            args, input=payload, stdout=subprocess.PIPE,
            stderr=subprocess.PIPE, timeout=adapter.timeout_s)
    except subprocess.TimeoutExpired as exc:
        raise AdapterTimeout(
            f"adapter {adapter.name!r} timed out after "
            f"{adapter.timeout_s}s") from exc
    except OSError as exc:
        raise AdapterError(
            f"adapter {adapter.name!r} failed to start: {exc}") from exc
    if proc.returncode != 0:
        tail = proc.stderr.decode(errors="replace")[-500:]
        raise AdapterError(
            f"adapter {adapter.name!r} exited {proc.returncode}: {tail}")
    return proc.stdout


def call_wav(adapter: EnhancerAdapter, wav: bytes,
             mode: int | None = None) -> bytes:
    """Run an audio adapter; validates the response parses as WAV."""
    out = _invoke(adapter, wav, mode=mode)
    try:
        with wave.open(io.BytesIO(out), "rb"):
            pass
    except (wave.Error, EOFError) as exc:
        raise AdapterError(
            f"adapter {adapter.name!r} returned invalid WAV: {exc}") from exc
    return out


def call_json(adapter: EnhancerAdapter, wav: bytes) -> dict:
    out = _invoke(adapter, wav)
    try:
        parsed = json.loads(out.decode("utf-8").strip())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise AdapterError(
            f"adapter {adapter.name!r} returned invalid JSON: {exc}") from exc
    if not isinstance(parsed, dict):
        raise AdapterError(
            f"adapter {adapter.name!r} returned non-object JSON")
    return parsed


def call_score(adapter: EnhancerAdapter, wav: bytes) -> float:
    parsed = call_json(adapter, wav)
    try:
        value = float(parsed["score"])
    except (KeyError, TypeError, ValueError) as exc:
        raise AdapterError(
            f"adapter {adapter.name!r} returned no usable score: "
            f"{parsed}") from exc
    if not math.isfinite(value):
        raise AdapterError(f"adapter {adapter.name!r} returned "
                           f"non-finite score {value}")
    return value


def produce_candidates(record: UtteranceRecord, registry: AdapterRegistry,
                       out_dir: str | Path,
                       source_path: str | Path) -> EnhancementCandidateSet:
    """Denoise one utterance and restore it in every mode.

    Outputs land in out_dir/<utterance_id>/<label>.wav; the source file
    is never touched. Individual restore-mode failures are recorded as
    absences.

    Raises:
        EnhancementError: the denoiser failed, so no set can be built.
    """
    denoiser = registry.require("denoiser")
    restorer = registry.require("restorer")
    src = Path(source_path).read_bytes()
    utt_dir = Path(out_dir) / record.utterance_id
    utt_dir.mkdir(parents=True, exist_ok=True)

    try:
        denoised = call_wav(denoiser, src)
    except AdapterError as exc:
        raise EnhancementError(
            f"denoiser failed on {record.utterance_id!r}: {exc}") from exc
    denoised_path = utt_dir / "denoised.wav"
    denoised_path.write_bytes(denoised)

    candidates = [Candidate(label="denoised", path=denoised_path)]
    absent: dict[str, str] = {}
    for mode in RESTORE_MODES:
        label = f"mode{mode}"
        try:
            restored = call_wav(restorer, denoised, mode=mode)
        except AdapterError as exc:
            absent[label] = str(exc)
            logger.warning("restore %s failed on %s: %s",
                           label, record.utterance_id, exc)
            continue
        path = utt_dir / f"{label}.wav"
        path.write_bytes(restored)
        candidates.append(Candidate(label=label, path=path))
    return EnhancementCandidateSet(
        utterance_id=record.utterance_id,
        candidates=tuple(candidates),
        absent=absent,
    )


def score_candidates(cset: EnhancementCandidateSet,
                     estimator: EnhancerAdapter) -> EnhancementCandidateSet:
    """Attach a predicted MOS to every present candidate.

    An estimator failure leaves that candidate unscored rather than
    failing the set.
    """
    if not cset.candidates:
        raise EnhancementError(f"no candidates to score for "
                               f"{cset.utterance_id!r}")
    scored = []
    for cand in cset.candidates:
        try:
            value = call_score(estimator, cand.path.read_bytes())
        except AdapterError as exc:
            logger.warning("scoring %s/%s failed: %s",
                           cset.utterance_id, cand.label, exc)
            scored.append(cand)
            continue
        scored.append(dc_replace(cand, predicted_mos=value))
    return dc_replace(cset, candidates=tuple(scored))


def select_best(cset: EnhancementCandidateSet) -> Candidate:
    """Pick the highest-scored candidate; ties keep canonical order.

    Raises:
        SelectionError: no candidate carries a score.
    """
    best: Candidate | None = None
    for cand in cset.candidates:
        if cand.predicted_mos is None:
            continue
        if best is None or cand.predicted_mos > best.predicted_mos:
            best = cand
    if best is None:
        raise SelectionError(
            f"no scored candidate for {cset.utterance_id!r}")
    return best


def enhance_manifest(
    manifest: Manifest,
    registry: AdapterRegistry,
    out_dir: str | Path,
    max_workers: int = 4,
) -> tuple[Manifest, list[dict]]:
    """Run the full chain over a manifest with a bounded worker pool.

    Returns a manifest whose audio paths point at each utterance's best
    candidate (relative to out_dir) plus a per-utterance report. An
    utterance whose denoise fails is logged, reported, and dropped; the
    rest of the batch continues.
    """
    out_dir = Path(out_dir)
    estimator = registry.require("quality_estimator")

    def work(index: int, rec: UtteranceRecord):
        source = manifest.resolve_audio(rec)
        cset = produce_candidates(rec, registry, out_dir, source)
        cset = score_candidates(cset, estimator)
        best = select_best(cset)
        return index, rec, cset, best

    results = []
    failures: dict[int, tuple[UtteranceRecord, str]] = {}
    with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = {
            pool.submit(work, i, rec): (i, rec)
            for i, rec in enumerate(manifest)
        }
        for fut in concurrent.futures.as_completed(futures):
            i, rec = futures[fut]
            try:
                results.append(fut.result())
            except (EnhancementError, SelectionError) as exc:
                logger.error("utterance %s failed: %s", rec.utterance_id, exc)
                failures[i] = (rec, str(exc))

    results.sort(key=lambda item: item[0])
    records = []
    report = []
    for i, rec, cset, best in results:
        with wave.open(str(best.path), "rb") as w:
            rate = w.getframerate()
            duration = w.getnframes() / rate
        records.append(dc_replace(
            rec,
            audio_path=str(best.path.relative_to(out_dir)),
            sample_rate_hz=rate,
            duration_s=duration,
        ))
        report.append({
            "utterance_id": rec.utterance_id,
            "status": "ok",
            "best": best.label,
            "scores": {c.label: c.predicted_mos for c in cset.candidates},
            "absent": dict(cset.absent),
        })
    for i in sorted(failures):
        rec, reason = failures[i]
        report.append({
            "utterance_id": rec.utterance_id,
            "status": "failed",
            "reason": reason,
        })
    new_manifest = Manifest(
        records=tuple(records),
        source_uri=str(out_dir / "manifest.jsonl"),
    )
    return new_manifest, report
