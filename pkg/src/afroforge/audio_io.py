"""WAV PCM 16-bit mono read/write; intermediates are float32 buffers."""

from __future__ import annotations

import io
import wave
from pathlib import Path

import numpy as np

from .dsp import AudioBuffer, DspError

_SCALE = 32767.0


class WavFormatError(DspError):
    """Raised for WAV files outside the PCM-16 mono contract."""


def _decode(w: wave.Wave_read) -> AudioBuffer:
    if w.getnchannels() != 1:
        raise WavFormatError(f"expected mono, got {w.getnchannels()} channels")
    if w.getsampwidth() != 2:
        raise WavFormatError(
            f"expected 16-bit PCM, got {8 * w.getsampwidth()}-bit")
    raw = w.readframes(w.getnframes())
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float32) / 32768.0
    return AudioBuffer(samples, w.getframerate())


def read_wav(path: str | Path) -> AudioBuffer:
    with wave.open(str(path), "rb") as w:
        return _decode(w)


def read_wav_bytes(data: bytes) -> AudioBuffer:
    with wave.open(io.BytesIO(data), "rb") as w:
        return _decode(w)


def _encode(buffer: AudioBuffer, sink) -> None:
    pcm = np.clip(np.rint(buffer.samples.astype(np.float64) * _SCALE),
                  -32768, 32767).astype("<i2")
    with wave.open(sink, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(buffer.sample_rate_hz)
        w.writeframes(pcm.tobytes())


def write_wav(buffer: AudioBuffer, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as f:
        _encode(buffer, f)
    return path


def wav_bytes(buffer: AudioBuffer) -> bytes:
    sink = io.BytesIO()
    _encode(buffer, sink)
    return sink.getvalue()
