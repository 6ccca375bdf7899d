"""Tempo and pitch modification for emotional speech variants.

Time stretching uses waveform-similarity overlap-add (WSOLA): output
frames are laid down on a fixed 50%-overlap Hann grid, and each frame is
fetched from the input near its nominal position, shifted within a small
search radius to best continue the previously chosen frame. That keeps
pitch intact without any FFT phase bookkeeping. Pitch shifting composes
a linear-interpolation resample (which scales pitch and duration
together) with a compensating time stretch.

The urgent and hesitant presets raise or lower both tempo and pitch so
that the resulting clip moves the measured arousal in the matching
direction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arousal import Emotion
from .audio import AudioBuffer, resample
from .errors import ParameterError

WINDOW_SEC = 0.030
SEARCH_SEC = 0.010

FACTOR_MIN = 0.5
FACTOR_MAX = 2.0


def _check_factor(factor: float, name: str) -> None:
    if not FACTOR_MIN <= factor <= FACTOR_MAX:
        raise ParameterError(
            f"{name} must lie in [{FACTOR_MIN}, {FACTOR_MAX}], got {factor}")


@dataclass(frozen=True)
class ProsodyParams:
    """Joint tempo/pitch scaling.

    tempo_factor > 1 speeds the clip up (output duration = input / factor);
    pitch_factor > 1 raises the fundamental (output F0 = input F0 * factor).
    """

    tempo_factor: float
    pitch_factor: float

    def __post_init__(self):
        _check_factor(self.tempo_factor, "tempo_factor")
        _check_factor(self.pitch_factor, "pitch_factor")


EMOTION_PRESETS: dict[Emotion, ProsodyParams] = {
    Emotion.URGENT: ProsodyParams(tempo_factor=1.3, pitch_factor=1.25),
    Emotion.HESITANT: ProsodyParams(tempo_factor=0.75, pitch_factor=0.85),
}


def time_stretch(audio: AudioBuffer, factor: float) -> AudioBuffer:
    """Change tempo by ``factor`` without changing pitch.

    Parameters
    ----------
    audio : AudioBuffer
        Input clip.
    factor : float in [0.5, 2.0]
        Speed multiplier; the output lasts ``duration / factor``.
    """
    _check_factor(factor, "factor")
    x = audio.samples
    if abs(factor - 1.0) < 1e-9 or x.size == 0:
        return AudioBuffer(x.copy(), audio.sample_rate)

    window_len = int(round(WINDOW_SEC * audio.sample_rate))
    window_len += window_len % 2  # even, so the hop is exactly half
    hop = window_len // 2
    search = int(round(SEARCH_SEC * audio.sample_rate))
    n_out = int(round(x.size / factor))

    if x.size <= window_len:
        # Too short for overlap-add; fall back to nearest-sample repetition.
        positions = np.minimum((np.arange(n_out) * factor).astype(int), x.size - 1)
        return AudioBuffer(x[positions], audio.sample_rate)

    window = np.hanning(window_len)
    out = np.zeros(n_out + window_len)
    norm = np.zeros(n_out + window_len)

    def segment(start: int) -> np.ndarray:
        seg = x[start:start + window_len]
        if seg.size < window_len:
            seg = np.pad(seg, (0, window_len - seg.size))
        return seg

    out[:window_len] += segment(0) * window
    norm[:window_len] += window
    prev_start = 0
    k = 1
    while k * hop < n_out:
        nominal = int(round(k * hop * factor))
        target = segment(prev_start + hop)  # natural continuation
        lo = max(0, nominal - search)
        hi = min(x.size - window_len, nominal + search)
        if hi <= lo:
            start = max(0, min(x.size - window_len, nominal))
        else:
            region = x[lo:hi + window_len]
            scores = np.correlate(region, target, mode="valid")
            start = lo + int(np.argmax(scores))
        pos = k * hop
        out[pos:pos + window_len] += segment(start) * window
        norm[pos:pos + window_len] += window
        prev_start = start
        k += 1

    norm[norm < 1e-8] = 1.0
    return AudioBuffer(np.clip(out[:n_out] / norm[:n_out], -1.0, 1.0),
                       audio.sample_rate)


def pitch_shift(audio: AudioBuffer, factor: float) -> AudioBuffer:
    """Scale the fundamental frequency by ``factor`` at constant duration.

    Implemented as a resample (raising pitch while shortening) followed by
    a compensating WSOLA stretch back to the original duration.
    """
    _check_factor(factor, "factor")
    if abs(factor - 1.0) < 1e-9:
        return AudioBuffer(audio.samples.copy(), audio.sample_rate)
    n_out = int(round(audio.samples.size / factor))
    positions = np.arange(n_out) * factor
    shifted = np.interp(positions, np.arange(audio.samples.size), audio.samples)
    return time_stretch(AudioBuffer(shifted, audio.sample_rate), 1.0 / factor)


def emotionalize(audio: AudioBuffer, emotion: Emotion) -> AudioBuffer:
    """Apply an emotion preset; ``normal`` is a no-op returning the input."""
    if emotion == Emotion.NORMAL:
        return audio
    try:
        preset = EMOTION_PRESETS[Emotion(emotion)]
    except (KeyError, ValueError):
        raise ParameterError(f"no prosody preset for emotion {emotion!r}") from None
    return time_stretch(pitch_shift(audio, preset.pitch_factor), preset.tempo_factor)
