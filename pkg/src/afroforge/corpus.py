"""Corpus data model: manifest ingestion, validation, and dataset statistics.

A manifest is the machine-readable index of corpus utterances. The
canonical serialization is JSON Lines (one record per line, UTF-8);
CSV import with a header row is supported for spreadsheet-sourced
metadata. Records are immutable after ingestion.
"""

from __future__ import annotations

import csv
import json
import os
import wave
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Iterator

from .iso3166 import is_country_code

GENDERS = ("female", "male", "unspecified")

FIELD_NAMES = (
    "utterance_id", "speaker_id", "country", "accent", "gender",
    "age_group", "text", "audio_path", "duration_s", "sample_rate_hz",
)


class ManifestError(ValueError):
    """Raised when a manifest row or file violates the data model."""


def normalize_gender(value: str) -> str:
    """Map free-form gender labels onto {female, male, unspecified}."""
    lowered = str(value).strip().lower()
    return lowered if lowered in ("female", "male") else "unspecified"


@dataclass(frozen=True)
class UtteranceRecord:
    """One recording: audio reference, transcript, and speaker metadata."""

    utterance_id: str
    speaker_id: str
    country: str
    accent: str
    gender: str
    age_group: str
    text: str
    audio_path: str
    duration_s: float
    sample_rate_hz: int

    @classmethod
    def from_dict(cls, raw: dict, *, line: int | None = None) -> "UtteranceRecord":
        """Build a validated record from a parsed JSONL/CSV row."""
        where = f" (line {line})" if line is not None else ""
        missing = [f for f in FIELD_NAMES if f not in raw]
        if missing:
            raise ManifestError(f"missing fields {missing}{where}")
        # gender/age_group tolerate blanks (mapped to catch-alls); every
        # other field must carry a value.
        empty = [f for f in FIELD_NAMES
                 if f not in ("gender", "age_group") and raw[f] in (None, "")]
        if empty:
            raise ManifestError(f"empty fields {empty}{where}")
        try:
            duration_s = float(raw["duration_s"])
            sample_rate_hz = int(raw["sample_rate_hz"])
        except (TypeError, ValueError) as exc:
            raise ManifestError(f"malformed numeric field{where}: {exc}") from exc
        if duration_s <= 0:
            raise ManifestError(
                f"duration_s must be > 0, got {duration_s}{where}")
        if sample_rate_hz <= 0:
            raise ManifestError(
                f"sample_rate_hz must be positive, got {sample_rate_hz}{where}")
        country = str(raw["country"]).strip().upper()
        if not is_country_code(country):
            raise ManifestError(f"unknown country code {country!r}{where}")
        accent = str(raw["accent"])
        if not accent.strip():
            raise ManifestError(f"accent must be non-empty{where}")
        return cls(
            utterance_id=str(raw["utterance_id"]),
            speaker_id=str(raw["speaker_id"]),
            country=country,
            accent=accent,
            gender=normalize_gender(raw["gender"]),
            age_group=str(raw["age_group"]),
            text=str(raw["text"]),
            audio_path=str(raw["audio_path"]),
            duration_s=duration_s,
            sample_rate_hz=sample_rate_hz,
        )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Manifest:
    """Ordered, validated collection of utterance records."""

    records: tuple[UtteranceRecord, ...]
    source_uri: str = ""

    def __post_init__(self) -> None:
        seen: dict[str, int] = {}
        for i, rec in enumerate(self.records):
            if rec.utterance_id in seen:
                raise ManifestError(
                    f"duplicate utterance_id {rec.utterance_id!r} "
                    f"(records {seen[rec.utterance_id] + 1} and {i + 1})")
            seen[rec.utterance_id] = i

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[UtteranceRecord]:
        return iter(self.records)

    def total_duration_s(self) -> float:
        return sum(r.duration_s for r in self.records)

    def audio_root(self) -> Path:
        """Directory that relative audio_path values resolve against."""
        return Path(self.source_uri).parent if self.source_uri else Path(".")

    def resolve_audio(self, record: UtteranceRecord) -> Path:
        path = Path(record.audio_path)
        return path if path.is_absolute() else self.audio_root() / path


@dataclass(frozen=True)
class CountryRow:
    country: str
    n_samples: int
    n_speakers: int
    n_accents: int
    duration_h: float


@dataclass(frozen=True)
class CorpusStats:
    """Per-country sample/speaker/accent/duration totals."""

    rows: tuple[CountryRow, ...]

    def to_dicts(self) -> list[dict]:
        return [asdict(r) for r in self.rows]


@dataclass(frozen=True)
class AudioCheck:
    utterance_id: str
    ok: bool
    reason: str = ""


def load_manifest(path: str | Path, format: str | None = None) -> Manifest:
    """Load and validate a manifest from JSONL or CSV.

    Args:
        path: manifest file.
        format: "jsonl" or "csv"; inferred from the suffix when omitted.

    Raises:
        ManifestError: malformed row (with its line number), duplicate
            utterance_id (naming the id and both lines), or constraint
            violation such as nonpositive duration.
    """
    path = Path(path)
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    if format not in ("jsonl", "csv"):
        raise ManifestError(f"unknown manifest format {format!r}")

    records: list[UtteranceRecord] = []
    seen: dict[str, int] = {}

    def add(raw: dict, line: int) -> None:
        rec = UtteranceRecord.from_dict(raw, line=line)
        if rec.utterance_id in seen:
            raise ManifestError(
                f"duplicate utterance_id {rec.utterance_id!r} on lines "
                f"{seen[rec.utterance_id]} and {line}")
        seen[rec.utterance_id] = line
        records.append(rec)

    if format == "jsonl":
        with path.open(encoding="utf-8") as f:
            for line_no, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    raw = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ManifestError(
                        f"malformed JSON on line {line_no}: {exc}") from exc
                if not isinstance(raw, dict):
                    raise ManifestError(f"line {line_no} is not an object")
                add(raw, line_no)
    else:
        with path.open(encoding="utf-8", newline="") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames is None:
                raise ManifestError("CSV file has no header row")
            unknown = set(reader.fieldnames) - set(FIELD_NAMES)
            if unknown:
                raise ManifestError(f"unknown CSV columns: {sorted(unknown)}")
            for row_no, raw in enumerate(reader, start=2):
                add(raw, row_no)

    return Manifest(records=tuple(records), source_uri=str(path))


def write_manifest(manifest: Manifest, path: str | Path) -> Path:
    """Write a manifest as JSON Lines; inverse of load_manifest."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for rec in manifest.records:
            f.write(json.dumps(rec.to_dict(), ensure_ascii=False) + "\n")
    return path


def rebase_audio_paths(manifest: Manifest, target_dir: str | Path) -> Manifest:
    """Rewrite relative audio paths to resolve from target_dir instead.

    Needed whenever a manifest copy is written into a different
    directory than its source; absolute paths pass through untouched.
    """
    target = Path(target_dir)
    records = []
    for rec in manifest:
        if Path(rec.audio_path).is_absolute():
            records.append(rec)
            continue
        resolved = manifest.resolve_audio(rec)
        records.append(replace(
            rec, audio_path=os.path.relpath(resolved, target)))
    return Manifest(records=tuple(records), source_uri=manifest.source_uri)


def compute_stats(manifest: Manifest) -> CorpusStats:
    """Aggregate per-country statistics, ordered by sample count descending."""
    samples: dict[str, int] = {}
    speakers: dict[str, set[str]] = {}
    accents: dict[str, set[str]] = {}
    seconds: dict[str, float] = {}
    for rec in manifest:
        samples[rec.country] = samples.get(rec.country, 0) + 1
        speakers.setdefault(rec.country, set()).add(rec.speaker_id)
        accents.setdefault(rec.country, set()).add(rec.accent)
        seconds[rec.country] = seconds.get(rec.country, 0.0) + rec.duration_s
    rows = [
        CountryRow(
            country=c,
            n_samples=samples[c],
            n_speakers=len(speakers[c]),
            n_accents=len(accents[c]),
            duration_h=seconds[c] / 3600.0,
        )
        for c in samples
    ]
    rows.sort(key=lambda r: (-r.n_samples, r.country))
    return CorpusStats(rows=tuple(rows))


def validate_audio(manifest: Manifest,
                   audio_root: str | Path | None = None) -> list[AudioCheck]:
    """Check every record's audio file: existence, decodability, agreement.

    Failures become report entries, never exceptions. Sample rate and
    duration from the WAV header must agree with the metadata within 1 %.
    """
    root = Path(audio_root) if audio_root is not None else manifest.audio_root()
    checks: list[AudioCheck] = []
    for rec in manifest:
        path = Path(rec.audio_path)
        if not path.is_absolute():
            path = root / path
        if not path.exists():
            checks.append(AudioCheck(rec.utterance_id, False, "missing file"))
            continue
        try:
            with wave.open(str(path), "rb") as w:
                rate = w.getframerate()
                frames = w.getnframes()
        except (wave.Error, EOFError, OSError) as exc:
            checks.append(AudioCheck(
                rec.utterance_id, False, f"undecodable header: {exc}"))
            continue
        if abs(rate - rec.sample_rate_hz) > 0.01 * rec.sample_rate_hz:
            checks.append(AudioCheck(
                rec.utterance_id, False,
                f"sample rate mismatch: header {rate}, metadata "
                f"{rec.sample_rate_hz}"))
            continue
        decoded_s = frames / rate if rate else 0.0
        if abs(decoded_s - rec.duration_s) > 0.01 * rec.duration_s:
            checks.append(AudioCheck(
                rec.utterance_id, False,
                f"duration mismatch: decoded {decoded_s:.3f}s, metadata "
                f"{rec.duration_s:.3f}s"))
            continue
        checks.append(AudioCheck(rec.utterance_id, True))
    return checks
