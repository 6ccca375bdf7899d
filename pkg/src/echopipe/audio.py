"""Mono audio buffers plus a small RIFF/WAVE codec.

Reads PCM 16-bit and IEEE float 32-bit WAVE files (mono or stereo, stereo
downmixed by channel average) and writes PCM 16-bit mono at the canonical
16 kHz analysis rate. All analysis elsewhere in the package assumes the
canonical rate; ``resample`` converts by linear interpolation.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import AudioDecodeError, ParameterError, UnsupportedFormatError

CANONICAL_RATE = 16000

_WAVE_FORMAT_PCM = 1
_WAVE_FORMAT_IEEE_FLOAT = 3


@dataclass(frozen=True)
class AudioBuffer:
    """Mono PCM samples in [-1, 1] together with their sample rate."""

    samples: np.ndarray = field(repr=False)
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64).reshape(-1)
        if self.sample_rate <= 0:
            raise ParameterError(f"sample_rate must be positive, got {self.sample_rate}")
        if samples.size and not np.all(np.isfinite(samples)):
            raise ParameterError("audio samples must be finite")
        object.__setattr__(self, "samples", samples)

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def __len__(self) -> int:
        return self.samples.size


def decode_wav(data: bytes) -> AudioBuffer:
    """Decode a RIFF/WAVE byte string into a mono AudioBuffer.

    Accepts PCM16 and float32, 1 or 2 channels. Stereo is downmixed by
    averaging; samples end up scaled to [-1, 1].
    """
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise AudioDecodeError("not a RIFF/WAVE stream")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8:pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise AudioDecodeError("fmt chunk truncated")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if len(body) < chunk_size:
                raise AudioDecodeError("data chunk truncated")
            payload = body
        pos += 8 + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if fmt is None or payload is None:
        raise AudioDecodeError("missing fmt or data chunk")

    audio_format, channels, sample_rate, _, _, bits = fmt
    if channels not in (1, 2):
        raise UnsupportedFormatError(f"unsupported channel count {channels}")
    if audio_format == _WAVE_FORMAT_PCM and bits == 16:
        raw = np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32768.0
    elif audio_format == _WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        raw = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    else:
        raise UnsupportedFormatError(
            f"unsupported encoding (format {audio_format}, {bits}-bit)")

    if channels == 2:
        raw = raw[: raw.size - raw.size % 2].reshape(-1, 2).mean(axis=1)
    return AudioBuffer(np.clip(raw, -1.0, 1.0), sample_rate)


def encode_wav(audio: AudioBuffer) -> bytes:
    """Encode as PCM16 mono WAVE at the canonical 16 kHz rate."""
    audio = resample(audio, CANONICAL_RATE)
    pcm = np.clip(np.round(audio.samples * 32767.0), -32768, 32767).astype("<i2")
    payload = pcm.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(payload), b"WAVE",
        b"fmt ", 16, _WAVE_FORMAT_PCM, 1, CANONICAL_RATE,
        CANONICAL_RATE * 2, 2, 16,
        b"data", len(payload),
    )
    return header + payload


def load_wav(path: str | Path) -> AudioBuffer:
    return decode_wav(Path(path).read_bytes())


def save_wav(path: str | Path, audio: AudioBuffer) -> None:
    Path(path).write_bytes(encode_wav(audio))


def resample(audio: AudioBuffer, rate: int) -> AudioBuffer:
    """Resample by linear interpolation; identity when rates already match."""
    if rate <= 0:
        raise ParameterError(f"target rate must be positive, got {rate}")
    if rate == audio.sample_rate or audio.samples.size == 0:
        return audio if rate == audio.sample_rate else AudioBuffer(audio.samples, rate)
    n_out = int(round(audio.samples.size * rate / audio.sample_rate))
    positions = np.arange(n_out) * (audio.sample_rate / rate)
    samples = np.interp(positions, np.arange(audio.samples.size), audio.samples)
    return AudioBuffer(samples, rate)
