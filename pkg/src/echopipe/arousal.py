"""Arousal scoring and emotion labeling.

Arousal is a weighted sum of sigmoid-transformed normalized features,
clipped to [0, 1]. High arousal reads as an urgent voice, low as a
hesitant one; the absolute thresholds (0.6 / 0.4) and the ratio
thresholds (1.15 / 0.85) carve out a dead band labeled normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ParameterError
from .features import NormalizedFeatures

URGENT_THRESHOLD = 0.6
HESITANT_THRESHOLD = 0.4
URGENT_RATIO = 1.15
HESITANT_RATIO = 0.85


class Emotion(str, Enum):
    NORMAL = "normal"
    URGENT = "urgent"
    HESITANT = "hesitant"

    def __str__(self) -> str:  # keeps f-strings and JSON tidy
        return self.value


@dataclass(frozen=True)
class SigmoidParams:
    """Steepness k and midpoint x0 of one logistic transform."""

    k: float
    x0: float

    def __post_init__(self):
        if self.k <= 0:
            raise ParameterError(f"sigmoid steepness must be positive, got {self.k}")
        if not 0.0 <= self.x0 <= 1.0:
            raise ParameterError(f"sigmoid midpoint must lie in [0, 1], got {self.x0}")


@dataclass(frozen=True)
class ArousalWeights:
    """Per-feature weights and sigmoid parameters; weights must sum to 1."""

    w_r: float = 0.4
    w_f: float = 0.4
    w_t: float = 0.15
    w_c: float = 0.05
    params_r: SigmoidParams = SigmoidParams(8.0, 0.4)
    params_f: SigmoidParams = SigmoidParams(10.0, 0.5)
    params_t: SigmoidParams = SigmoidParams(7.0, 0.5)
    params_c: SigmoidParams = SigmoidParams(6.0, 0.4)

    def __post_init__(self):
        total = self.w_r + self.w_f + self.w_t + self.w_c
        if abs(total - 1.0) > 1e-9:
            raise ParameterError(f"weights must sum to 1, got {total}")


DEFAULT_WEIGHTS = ArousalWeights()


@dataclass(frozen=True)
class ArousalScore:
    """Clipped arousal value plus the four weighted sigmoid contributions."""

    value: float
    contributions: tuple[float, float, float, float]


def sigmoid(x: float, params: SigmoidParams) -> float:
    """Logistic transform 1 / (1 + exp(-k (x - x0)))."""
    return 1.0 / (1.0 + math.exp(-params.k * (x - params.x0)))


def arousal(features: NormalizedFeatures,
            weights: ArousalWeights = DEFAULT_WEIGHTS) -> ArousalScore:
    """Score a clip's arousal from its normalized features."""
    contributions = (
        weights.w_r * sigmoid(features.r_n, weights.params_r),
        weights.w_f * sigmoid(features.f_n, weights.params_f),
        weights.w_t * sigmoid(features.t_n, weights.params_t),
        weights.w_c * sigmoid(features.c_n, weights.params_c),
    )
    value = min(1.0, max(0.0, sum(contributions)))
    return ArousalScore(value=value, contributions=contributions)


def label_emotion(score: ArousalScore | float,
                  urgent_threshold: float = URGENT_THRESHOLD,
                  hesitant_threshold: float = HESITANT_THRESHOLD) -> Emotion:
    """Map absolute arousal to an emotion label."""
    value = score.value if isinstance(score, ArousalScore) else float(score)
    if value >= urgent_threshold:
        return Emotion.URGENT
    if value <= hesitant_threshold:
        return Emotion.HESITANT
    return Emotion.NORMAL


def label_by_ratio(synthetic: ArousalScore | float,
                   original: ArousalScore | float,
                   urgent_ratio: float = URGENT_RATIO,
                   hesitant_ratio: float = HESITANT_RATIO) -> Emotion:
    """Map the synthetic/original arousal ratio to an emotion label."""
    synth_value = synthetic.value if isinstance(synthetic, ArousalScore) else float(synthetic)
    orig_value = original.value if isinstance(original, ArousalScore) else float(original)
    if orig_value <= 0.0:
        raise ParameterError("original arousal must be positive for a ratio label")
    ratio = synth_value / orig_value
    if ratio >= urgent_ratio:
        return Emotion.URGENT
    if ratio <= hesitant_ratio:
        return Emotion.HESITANT
    return Emotion.NORMAL
