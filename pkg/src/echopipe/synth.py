"""Deterministic speech-like test signal generator.

Stands in for a TTS engine when building datasets and fixtures: a
harmonic source with a linear pitch drift, shaped by a raised-cosine
syllable envelope, plus an optional uniform noise floor. Identical specs
(including the seed) always render bit-identical buffers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import CANONICAL_RATE, AudioBuffer
from .errors import ParameterError

HARMONIC_AMPS = (1.0, 0.5, 0.25, 0.125)


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of one synthetic utterance."""

    f0: float
    f0_slope: float = 0.0
    amplitude: float = 0.5
    syllable_rate: float = 2.0
    duration: float = 2.0
    noise_floor: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.duration < 0.5:
            raise ParameterError(f"duration must be >= 0.5 s, got {self.duration}")
        if not 50.0 <= self.f0 <= 500.0:
            raise ParameterError(f"f0 must lie in [50, 500] Hz, got {self.f0}")
        if not 0.5 <= self.syllable_rate <= 8.0:
            raise ParameterError(
                f"syllable_rate must lie in [0.5, 8] Hz, got {self.syllable_rate}")
        if not 0.0 <= self.amplitude <= 1.0:
            raise ParameterError(f"amplitude must lie in [0, 1], got {self.amplitude}")
        if not 0.0 <= self.noise_floor <= 1.0:
            raise ParameterError(f"noise_floor must lie in [0, 1], got {self.noise_floor}")


def synth_speech(spec: SynthSpec) -> AudioBuffer:
    """Render the spec at 16 kHz; a pure function of its arguments."""
    n = int(round(spec.duration * CANONICAL_RATE))
    t = np.arange(n) / CANONICAL_RATE
    # Linear F0 drift integrates to a quadratic phase.
    phase = 2.0 * np.pi * (spec.f0 * t + 0.5 * spec.f0_slope * t ** 2)
    source = np.zeros(n)
    for k, amp in enumerate(HARMONIC_AMPS, start=1):
        source += amp * np.sin(k * phase)
    source /= sum(HARMONIC_AMPS)

    envelope = 0.5 * (1.0 - np.cos(2.0 * np.pi * spec.syllable_rate * t))
    rng = np.random.default_rng(spec.seed)
    noise = spec.noise_floor * rng.uniform(-1.0, 1.0, n)
    samples = np.clip(spec.amplitude * source * envelope + noise, -1.0, 1.0)
    return AudioBuffer(samples, CANONICAL_RATE)
