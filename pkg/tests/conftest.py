import math

import numpy as np
import pytest

from echopipe.audio import CANONICAL_RATE, AudioBuffer
from echopipe.dataset import SceneRecord, write_scenes


def pure_tone(freq: float, duration: float = 2.0, amplitude: float = 0.5,
              rate: int = CANONICAL_RATE) -> AudioBuffer:
    t = np.arange(int(round(duration * rate))) / rate
    return AudioBuffer(amplitude * np.sin(2.0 * np.pi * freq * t), rate)


def pulsed_tone(freq: float, pulse_hz: float, duration: float = 2.0,
                amplitude: float = 0.5, rate: int = CANONICAL_RATE) -> AudioBuffer:
    t = np.arange(int(round(duration * rate))) / rate
    envelope = 0.5 * (1.0 - np.cos(2.0 * np.pi * pulse_hz * t))
    return AudioBuffer(amplitude * np.sin(2.0 * np.pi * freq * t) * envelope, rate)


@pytest.fixture
def tone_220() -> AudioBuffer:
    return pure_tone(220.0)


@pytest.fixture
def silence() -> AudioBuffer:
    return AudioBuffer(np.zeros(CANONICAL_RATE), CANONICAL_RATE)


def make_scene(scene_id: str, frame_id: str, kind: str = "straight",
               speed: float = 8.0, index: int = 0) -> SceneRecord:
    """Synthetic keyframe in its ego frame with one parked agent nearby."""
    t_future = np.arange(1, 7) * 0.5
    t_history = -np.arange(4, 0, -1) * 0.5
    accel = 0.0
    if kind == "straight":
        future = np.column_stack([speed * t_future, np.zeros(6)])
    elif kind == "left":
        angles = np.linspace(0.08, math.radians(55.0), 6)
        radius = speed * 3.0 / angles[-1]
        future = np.column_stack([radius * np.sin(angles),
                                  radius * (1.0 - np.cos(angles))])
    elif kind == "right":
        angles = np.linspace(0.08, math.radians(55.0), 6)
        radius = speed * 3.0 / angles[-1]
        future = np.column_stack([radius * np.sin(angles),
                                  -radius * (1.0 - np.cos(angles))])
    elif kind == "decelerate":
        seg_speeds = speed * np.array([0.9, 0.75, 0.6, 0.45, 0.35, 0.25])
        future = np.column_stack([np.cumsum(seg_speeds * 0.5), np.zeros(6)])
        accel = -1.2
    elif kind == "stationary":
        future = np.zeros((6, 2))
        speed = 0.0
    else:
        raise ValueError(kind)
    history = np.column_stack([speed * t_history, np.zeros(4)])
    # parked agent well off the driven corridor (turn apex reaches |y| ~ 11)
    agents = tuple(np.array([[4.0 * (i + 1), -20.0, 0.0, 4.0, 1.8]])
                   for i in range(6))
    return SceneRecord(scene_id=scene_id, frame_id=frame_id,
                       timestamp=0.5 * index, image_path=f"images/{frame_id}.jpg",
                       ego_history=history, ego_future=future,
                       ego_speed=speed, ego_accel=accel, agents=agents)


def make_scene_set() -> list[SceneRecord]:
    kinds = ("straight", "left", "right", "decelerate", "straight", "stationary")
    return [make_scene("scene-0001", f"frame-{i:04d}", kind, speed=6.0 + i, index=i)
            for i, kind in enumerate(kinds)]


@pytest.fixture
def scenes_file(tmp_path):
    path = tmp_path / "scenes.jsonl"
    write_scenes(path, make_scene_set())
    return path
