"""Deterministic signal processing: loudness, pause trimming, resampling.

All stages are pure per-buffer functions over mono float32 audio, so a
pipeline may process utterances in parallel without shared state. The
loudness measure is plain RMS dBFS over the whole buffer (no gating),
and the resampler is a windowed-sinc (Kaiser, beta 8) design so output
is identical across platforms. The resampler is tuned for the speech
rate family (8/16/32/48 kHz); exotic ratios work but run long filters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .corpus import UtteranceRecord

SUPPORTED_VAD_RATES = (8000, 16000, 32000, 48000)

MAX_ELIGIBLE_DURATION_S = 50.0
MAX_ELIGIBLE_TEXT_CHARS = 400

# Frame energy (dBFS RMS) below which a frame counts as silence, indexed
# by aggressiveness. A moderately energetic frame with speech-like
# zero-crossing density is rescued (unvoiced fricatives).
_SILENCE_DBFS = {0: -70.0, 1: -60.0, 2: -50.0, 3: -40.0}
_ZCR_RESCUE_MARGIN_DB = 12.0
_ZCR_SPEECH_MIN = 0.15

_DB_FLOOR = -200.0


class DspError(ValueError):
    """Raised when a stage precondition is violated."""


class SilentInputError(DspError):
    """Raised for all-zero input where gain is undefined."""


@dataclass(frozen=True)
class AudioBuffer:
    """Mono audio: float32 samples in [-1, 1] plus a sample rate."""

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.samples, dtype=np.float32)
        if arr.ndim != 1:
            raise DspError(f"expected mono 1-D samples, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DspError("samples contain non-finite values")
        if self.sample_rate_hz <= 0:
            raise DspError(f"sample rate must be positive, "
                           f"got {self.sample_rate_hz}")
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


@dataclass(frozen=True)
class VadConfig:
    """Voice-activity settings for pause trimming."""

    frame_ms: int = 30
    aggressiveness: int = 2
    max_pause_ms: int = 500

    def __post_init__(self) -> None:
        if self.frame_ms not in (10, 20, 30):
            raise DspError(f"frame_ms must be 10, 20 or 30, got {self.frame_ms}")
        if not 0 <= self.aggressiveness <= 3:
            raise DspError(f"aggressiveness must be in 0..3, "
                           f"got {self.aggressiveness}")
        if self.max_pause_ms <= 0:
            raise DspError(f"max_pause_ms must be positive, "
                           f"got {self.max_pause_ms}")


@dataclass(frozen=True)
class NormalizeResult:
    """rms_normalize output: scaled buffer, the gain used, clip count."""

    buffer: AudioBuffer
    gain: float
    clipped: int


class Eligibility(str, Enum):
    ELIGIBLE = "eligible"
    TOO_LONG_AUDIO = "too_long_audio"
    TOO_LONG_TEXT = "too_long_text"


def rms_dbfs(a: AudioBuffer) -> float:
    """RMS level of a buffer in dBFS (full scale = 1.0)."""
    rms = float(np.sqrt(np.mean(np.square(a.samples.astype(np.float64)))))
    if rms == 0.0:
        raise SilentInputError("silent input, level undefined")
    return 20.0 * math.log10(rms)


def rms_normalize(a: AudioBuffer, target_dbfs: float = -27.0) -> NormalizeResult:
    """Scale a buffer by a single gain so its RMS sits at target_dbfs.

    Samples pushed past full scale by the gain are hard-clipped and
    counted in the result.

    Raises:
        SilentInputError: all-zero input, gain undefined.
    """
    if len(a) == 0:
        raise DspError("empty buffer")
    x = a.samples.astype(np.float64)
    rms = float(np.sqrt(np.mean(np.square(x))))
    if rms == 0.0:
        raise SilentInputError("silent input, gain undefined")
    current_dbfs = 20.0 * math.log10(rms)
    gain = 10.0 ** ((target_dbfs - current_dbfs) / 20.0)
    y = x * gain
    clipped = int(np.count_nonzero(np.abs(y) > 1.0))
    y = np.clip(y, -1.0, 1.0)
    return NormalizeResult(
        buffer=AudioBuffer(y.astype(np.float32), a.sample_rate_hz),
        gain=gain,
        clipped=clipped,
    )


def classify_frames(a: AudioBuffer, cfg: VadConfig) -> list[tuple[int, int, bool]]:
    """Split a buffer into frames and mark each voiced or silent.

    Returns (start, end, voiced) sample spans covering the whole buffer;
    the final span may be shorter than one frame.
    """
    if a.sample_rate_hz not in SUPPORTED_VAD_RATES:
        raise DspError(
            f"unsupported sample rate {a.sample_rate_hz}; "
            f"expected one of {SUPPORTED_VAD_RATES}")
    if len(a) == 0:
        raise DspError("empty buffer")
    frame_len = a.sample_rate_hz * cfg.frame_ms // 1000
    threshold = _SILENCE_DBFS[cfg.aggressiveness]
    x = a.samples.astype(np.float64)
    spans: list[tuple[int, int, bool]] = []
    for start in range(0, len(x), frame_len):
        end = min(start + frame_len, len(x))
        frame = x[start:end]
        rms = float(np.sqrt(np.mean(np.square(frame))))
        db = 20.0 * math.log10(rms) if rms > 0 else _DB_FLOOR
        if len(frame) > 1:
            zcr = float(np.count_nonzero(
                frame[:-1] * frame[1:] < 0)) / (len(frame) - 1)
        else:
            zcr = 0.0
        voiced = db > threshold or (
            db > threshold - _ZCR_RESCUE_MARGIN_DB and zcr >= _ZCR_SPEECH_MIN)
        spans.append((start, end, voiced))
    return spans


def trim_pauses(a: AudioBuffer, cfg: VadConfig) -> AudioBuffer:
    """Shorten silence runs longer than max_pause_ms to exactly that length.

    Voiced frames pass through verbatim and in order; the retained part
    of a long pause is the run's first max_pause_ms of samples.
    """
    spans = classify_frames(a, cfg)
    max_pause = a.sample_rate_hz * cfg.max_pause_ms // 1000
    pieces: list[np.ndarray] = []
    run_start: int | None = None
    run_end = 0

    def flush_run() -> None:
        if run_start is None:
            return
        length = run_end - run_start
        keep = min(length, max_pause)
        pieces.append(a.samples[run_start:run_start + keep])

    for start, end, voiced in spans:
        if voiced:
            flush_run()
            run_start = None
            pieces.append(a.samples[start:end])
        else:
            if run_start is None:
                run_start = start
            run_end = end
    flush_run()
    if not pieces:
        out = np.zeros(0, dtype=np.float32)
    else:
        out = np.concatenate(pieces)
    return AudioBuffer(out, a.sample_rate_hz)


def resample(a: AudioBuffer, target_hz: int) -> AudioBuffer:
    """Band-limited windowed-sinc resampling.

    Output length is round(len * target / source). Equal rates return a
    copy bit-identical to the input. Interpolation ringing can overshoot
    full scale slightly; clipping is left to the writer.
    """
    if target_hz <= 0:
        raise DspError(f"target rate must be positive, got {target_hz}")
    src = a.sample_rate_hz
    if target_hz == src:
        return AudioBuffer(a.samples.copy(), src)
    if len(a) == 0:
        raise DspError("empty buffer")
    g = math.gcd(src, target_hz)
    up, down = target_hz // g, src // g
    x = a.samples.astype(np.float64)
    n_out = int(round(len(x) * target_hz / src))

    max_rate = max(up, down)
    half = 16 * max_rate
    n = np.arange(-half, half + 1)
    fc = 1.0 / max_rate
    h = fc * np.sinc(fc * n) * np.kaiser(2 * half + 1, 8.0)
    h /= h.sum()
    h *= up

    upsampled = np.zeros(len(x) * up, dtype=np.float64)
    upsampled[::up] = x
    filtered = np.convolve(upsampled, h)
    idx = half + np.arange(n_out) * down
    out = filtered[idx]
    return AudioBuffer(out.astype(np.float32), target_hz)


def check_eligibility(record: "UtteranceRecord") -> Eligibility:
    """Apply the corpus inclusion thresholds to one record.

    Audio longer than 50 s is excluded first; transcripts over 400
    Unicode characters next. Both bounds are inclusive on the eligible
    side (exactly 50.0 s / 400 chars still passes).
    """
    if record.duration_s > MAX_ELIGIBLE_DURATION_S:
        return Eligibility.TOO_LONG_AUDIO
    if len(record.text) > MAX_ELIGIBLE_TEXT_CHARS:
        return Eligibility.TOO_LONG_TEXT
    return Eligibility.ELIGIBLE
