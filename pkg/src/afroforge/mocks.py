"""Deterministic mock adapters for offline pipeline testing.

Each command speaks the adapter wire protocol: WAV PCM-16 mono on stdin,
and on stdout either a WAV (denoise/restore) or a one-line JSON object
(score/embed). Everything here is a pure function of the input bytes and
uses only the standard library, keeping subprocess start-up cheap.

Usage:
    python -m afroforge.mocks denoise        < in.wav > out.wav
    python -m afroforge.mocks restore <mode> < in.wav > out.wav
    python -m afroforge.mocks score          < in.wav > score.json
    python -m afroforge.mocks embed          < in.wav > embedding.json
"""

from __future__ import annotations

import array
import hashlib
import io
import json
import math
import struct
import sys
import wave

# One FIR kernel per restoration mode: smoothing, mild high boost, wide
# smoothing. Distinct kernels give the quality estimator something to
# disagree about.
RESTORE_KERNELS = {
    0: (0.25, 0.5, 0.25),
    1: (-0.125, 1.25, -0.125),
    2: (0.1, 0.2, 0.4, 0.2, 0.1),
}

EMBEDDING_DIM = 256


def _read_wav(data: bytes) -> tuple[array.array, int]:
    with wave.open(io.BytesIO(data), "rb") as w:
        if w.getnchannels() != 1 or w.getsampwidth() != 2:
            raise SystemExit("mock adapters require 16-bit mono WAV input")
        samples = array.array("h")
        samples.frombytes(w.readframes(w.getnframes()))
        if sys.byteorder == "big":
            samples.byteswap()
        return samples, w.getframerate()


def _write_wav(samples: array.array, rate: int) -> bytes:
    if sys.byteorder == "big":
        samples = array.array("h", samples)
        samples.byteswap()
    sink = io.BytesIO()
    with wave.open(sink, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(rate)
        w.writeframes(samples.tobytes())
    return sink.getvalue()


def denoise(data: bytes) -> bytes:
    """Identity denoiser: canonical re-encode of the input."""
    samples, rate = _read_wav(data)
    return _write_wav(samples, rate)


def restore(data: bytes, mode: int) -> bytes:
    """Apply the fixed FIR kernel for one restoration mode."""
    if mode not in RESTORE_KERNELS:
        raise SystemExit(f"unknown restore mode {mode}")
    kernel = RESTORE_KERNELS[mode]
    samples, rate = _read_wav(data)
    center = len(kernel) // 2
    n = len(samples)
    out = array.array("h", bytes(2 * n))
    for i in range(n):
        acc = 0.0
        for k, coeff in enumerate(kernel):
            j = i + k - center
            if 0 <= j < n:
                acc += coeff * samples[j]
        out[i] = max(-32768, min(32767, int(round(acc))))
    return _write_wav(out, rate)


def _fft(values: list[complex]) -> list[complex]:
    n = len(values)
    if n == 1:
        return values
    even = _fft(values[0::2])
    odd = _fft(values[1::2])
    twiddle = [
        complex(math.cos(-2 * math.pi * k / n),
                math.sin(-2 * math.pi * k / n)) * odd[k]
        for k in range(n // 2)
    ]
    return ([even[k] + twiddle[k] for k in range(n // 2)]
            + [even[k] - twiddle[k] for k in range(n // 2)])


def score(data: bytes) -> float:
    """Pseudo-MOS from spectral flatness of the first 1024 samples.

    Tonal signals (low flatness) score high, noise-like ones low; all
    that matters for tests is that the value is deterministic and
    depends on signal content.
    """
    samples, _rate = _read_wav(data)
    window = [complex(s / 32768.0, 0.0) for s in samples[:1024]]
    window.extend([0j] * (1024 - len(window)))
    spectrum = _fft(window)
    power = [abs(c) ** 2 for c in spectrum[1:512]]
    eps = 1e-12
    log_mean = math.fsum(math.log(p + eps) for p in power) / len(power)
    flatness = math.exp(log_mean) / (math.fsum(power) / len(power) + eps)
    mos = 1.0 + 4.0 * max(0.0, min(1.0, 1.0 - flatness))
    return round(mos, 4)


def embed(data: bytes) -> list[float]:
    """Unit-norm pseudo-embedding derived from a hash of the input bytes."""
    digest = hashlib.sha256(data).digest()
    values = []
    counter = 0
    while len(values) < EMBEDDING_DIM:
        block = hashlib.sha256(digest + struct.pack("<I", counter)).digest()
        for off in range(0, len(block), 8):
            if len(values) >= EMBEDDING_DIM:
                break
            word = struct.unpack_from("<q", block, off)[0]
            values.append(word / 2 ** 63)
        counter += 1
    norm = math.sqrt(math.fsum(v * v for v in values))
    return [v / norm for v in values]


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if not argv:
        raise SystemExit(__doc__)
    command = argv[0]
    data = sys.stdin.buffer.read()
    if command == "denoise":
        sys.stdout.buffer.write(denoise(data))
    elif command == "restore":
        mode = int(argv[1]) if len(argv) > 1 else 0
        sys.stdout.buffer.write(restore(data, mode))
    elif command == "score":
        sys.stdout.buffer.write(
            (json.dumps({"score": score(data)}) + "\n").encode())
    elif command == "embed":
        sys.stdout.buffer.write(
            (json.dumps({"vector": embed(data)}) + "\n").encode())
    else:
        raise SystemExit(f"unknown mock adapter command {command!r}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
