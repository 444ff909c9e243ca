"""Shared fixtures: synthetic tones, WAV files, and manifests.

Also prints one pass/fail line per acceptance criterion after a run
that includes tests/test_acceptance.py.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np
import pytest

_acceptance_outcomes: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _acceptance_outcomes.append((name, report.outcome))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, outcome in _acceptance_outcomes:
        flag = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"  [{flag}] {name}")

sys.path.insert(0, str(Path(__file__).parent))

from afroforge.audio_io import write_wav
from afroforge.corpus import Manifest, UtteranceRecord
from afroforge.dsp import AudioBuffer


def tone(freq_hz: float, duration_s: float, sample_rate_hz: int,
         amplitude: float = 0.5) -> AudioBuffer:
    t = np.arange(int(round(duration_s * sample_rate_hz))) / sample_rate_hz
    return AudioBuffer(
        (amplitude * np.sin(2 * np.pi * freq_hz * t)).astype(np.float32),
        sample_rate_hz)


def silence(duration_s: float, sample_rate_hz: int) -> AudioBuffer:
    return AudioBuffer(
        np.zeros(int(round(duration_s * sample_rate_hz)), dtype=np.float32),
        sample_rate_hz)


def concat(*buffers: AudioBuffer) -> AudioBuffer:
    rate = buffers[0].sample_rate_hz
    assert all(b.sample_rate_hz == rate for b in buffers)
    return AudioBuffer(np.concatenate([b.samples for b in buffers]), rate)


def make_record(i: int, speaker: str = "spk1", country: str = "NG",
                accent: str = "yoruba", gender: str = "female",
                duration_s: float = 2.0, text: str = "hello world",
                sample_rate_hz: int = 48000,
                audio_path: str | None = None) -> UtteranceRecord:
    return UtteranceRecord(
        utterance_id=f"u{i:04d}",
        speaker_id=speaker,
        country=country,
        accent=accent,
        gender=gender,
        age_group="19-25",
        text=text,
        audio_path=audio_path or f"wav/u{i:04d}.wav",
        duration_s=duration_s,
        sample_rate_hz=sample_rate_hz,
    )


def write_manifest_file(path: Path, records: list[UtteranceRecord]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec.to_dict()) + "\n")
    return path


@pytest.fixture
def tiny_corpus(tmp_path: Path) -> tuple[Path, Manifest]:
    """Three short speakers with on-disk WAVs and a matching manifest."""
    rng = np.random.default_rng(20240901)
    records = []
    for i in range(3):
        freq = 220.0 * (i + 1)
        buf = tone(freq, 0.5, 48000, amplitude=0.4)
        noisy = AudioBuffer(
            np.clip(buf.samples
                    + rng.normal(0, 0.01, len(buf)).astype(np.float32),
                    -1, 1),
            48000)
        rec = make_record(i, speaker=f"spk{i}", duration_s=noisy.duration_s)
        write_wav(noisy, tmp_path / rec.audio_path)
        records.append(rec)
    manifest_path = write_manifest_file(tmp_path / "manifest.jsonl", records)
    return manifest_path, Manifest(records=tuple(records),
                                   source_uri=str(manifest_path))
