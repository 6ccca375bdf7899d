"""Driving-intention clustering and structured command text.

Ego futures are clustered with seeded k-means (k-means++ init, Lloyd
iterations). Each centroid is auto-named from its own geometry: a large
final heading change names a turn, otherwise the speed delta names
acceleration or braking, a near-zero terminal speed names a stop, and
the remainder keeps straight. Command text is rendered from a fixed
template table shipped as package data, pairing a goal phrase for the
intention with a current-action phrase from speed/acceleration bands.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from .errors import ParameterError

#: Sampling interval of trajectory waypoints, seconds (2 Hz).
WAYPOINT_DT = 0.5

HEADING_WEIGHT = 5.0
SPEED_WEIGHT = 1.0

TURN_THRESHOLD_RAD = math.radians(15.0)
ACCEL_DELTA_MS = 1.0
STOP_SPEED_MS = 0.3

ACTION_STOPPED_BELOW_MS = 0.3
ACTION_ACCEL_ABOVE = 0.5
ACTION_BRAKE_BELOW = -0.5

KMEANS_TOL = 1e-6
KMEANS_MAX_ITER = 100

DEFAULT_K = 6


@lru_cache(maxsize=1)
def _templates() -> dict:
    with resources.files("echopipe").joinpath("templates.json").open() as fh:
        return json.load(fh)


@dataclass(frozen=True)
class IntentFeature:
    """Clustering features of one frame's ego future."""

    trajectory: np.ndarray = field(repr=False)  # (H, 2) future waypoints, ego frame
    heading_change: float                        # rad, final segment vs. ego axis
    speed_delta: float                           # m/s, terminal speed - current speed

    def __post_init__(self):
        traj = np.asarray(self.trajectory, dtype=np.float64)
        if traj.ndim != 2 or traj.shape[1] != 2 or traj.shape[0] < 2:
            raise ParameterError(f"trajectory must be (H>=2, 2), got {traj.shape}")
        if not (np.all(np.isfinite(traj)) and math.isfinite(self.heading_change)
                and math.isfinite(self.speed_delta)):
            raise ParameterError("intent features must be finite")
        object.__setattr__(self, "trajectory", traj)

    @classmethod
    def from_future(cls, points, ego_speed: float,
                    dt: float = WAYPOINT_DT) -> "IntentFeature":
        """Derive features from future waypoints and the current speed."""
        traj = np.asarray(points, dtype=np.float64)
        heading = 0.0
        # last segment with usable length decides the final heading
        for i in range(traj.shape[0] - 1, 0, -1):
            seg = traj[i] - traj[i - 1]
            if np.hypot(*seg) > 1e-9:
                heading = math.atan2(seg[1], seg[0])
                break
        terminal_speed = float(np.hypot(*(traj[-1] - traj[-2]))) / dt
        return cls(trajectory=traj, heading_change=heading,
                   speed_delta=terminal_speed - ego_speed)

    def vector(self) -> np.ndarray:
        return np.concatenate([
            self.trajectory.reshape(-1),
            [HEADING_WEIGHT * self.heading_change, SPEED_WEIGHT * self.speed_delta],
        ])

    def terminal_speed(self, dt: float = WAYPOINT_DT) -> float:
        return float(np.hypot(*(self.trajectory[-1] - self.trajectory[-2]))) / dt


@dataclass(frozen=True)
class IntentModel:
    """Fitted centroids with their intention names."""

    centroids: np.ndarray = field(repr=False)  # (k, D)
    names: tuple[str, ...]
    seed: int
    k: int
    iterations: int
    inertia_history: tuple[float, ...] = ()

    def to_json(self) -> str:
        return json.dumps({
            "k": self.k,
            "seed": self.seed,
            "iterations": self.iterations,
            "names": list(self.names),
            "centroids": self.centroids.tolist(),
        }, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "IntentModel":
        data = json.loads(text)
        return cls(centroids=np.asarray(data["centroids"], dtype=np.float64),
                   names=tuple(data["names"]), seed=data["seed"], k=data["k"],
                   iterations=data["iterations"])


@dataclass(frozen=True)
class CommandText:
    """Structured command: an imperative goal and a current-action phrase."""

    goal: str
    current_action: str

    def __post_init__(self):
        if not self.goal or not self.current_action:
            raise ParameterError("goal and current_action must be nonempty")

    @property
    def sentence(self) -> str:
        return f"{self.goal.capitalize()}. {self.current_action.capitalize()}."


def _kmeans_plusplus(vectors: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = vectors.shape[0]
    centroids = np.empty((k, vectors.shape[1]))
    centroids[0] = vectors[rng.integers(n)]
    closest_sq = ((vectors - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = closest_sq.sum()
        if total <= 0.0:  # all remaining points coincide with a centroid
            candidates = np.flatnonzero(closest_sq == 0.0)
            centroids[j] = vectors[candidates[j % candidates.size]]
        else:
            target = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(closest_sq), target))
            idx = min(idx, n - 1)
            centroids[j] = vectors[idx]
        closest_sq = np.minimum(closest_sq, ((vectors - centroids[j]) ** 2).sum(axis=1))
    return centroids


def _lloyd(vectors: np.ndarray, centroids: np.ndarray):
    inertia_history = []
    iterations = 0
    for iterations in range(1, KMEANS_MAX_ITER + 1):
        dists = ((vectors[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        assignment = dists.argmin(axis=1)  # ties resolve to the lowest index
        inertia_history.append(float(dists[np.arange(len(vectors)), assignment].sum()))
        updated = centroids.copy()
        for j in range(centroids.shape[0]):
            members = vectors[assignment == j]
            if members.size:
                updated[j] = members.mean(axis=0)
            else:  # re-seed an empty cluster on the overall farthest point
                worst = int(dists[np.arange(len(vectors)), assignment].argmax())
                updated[j] = vectors[worst]
        shift = np.abs(updated - centroids).max()
        centroids = updated
        if shift < KMEANS_TOL:
            break
    return centroids, iterations, inertia_history


def _name_centroid(centroid: np.ndarray) -> str:
    heading = centroid[-2] / HEADING_WEIGHT
    speed_delta = centroid[-1] / SPEED_WEIGHT
    traj = centroid[:-2].reshape(-1, 2)
    terminal_speed = float(np.hypot(*(traj[-1] - traj[-2]))) / WAYPOINT_DT
    if abs(heading) > TURN_THRESHOLD_RAD:
        return "turn left" if heading > 0 else "turn right"
    if speed_delta > ACCEL_DELTA_MS:
        return "accelerate"
    if speed_delta < -ACCEL_DELTA_MS:
        return "decelerate"
    if terminal_speed < STOP_SPEED_MS:
        return "stop"
    return "keep straight"


def _unique_names(raw: list[str]) -> tuple[str, ...]:
    seen: dict[str, int] = {}
    names = []
    for name in raw:
        seen[name] = seen.get(name, 0) + 1
        names.append(name if seen[name] == 1 else f"{name} {seen[name]}")
    return tuple(names)


def fit_intents(features, k: int, seed: int) -> IntentModel:
    """Cluster intent features into k named intentions, deterministically."""
    features = list(features)
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    if len(features) < k:
        raise ParameterError(f"need at least k={k} samples, got {len(features)}")
    vectors = np.stack([f.vector() for f in features])
    rng = np.random.default_rng(seed)
    centroids = _kmeans_plusplus(vectors, k, rng)
    centroids, iterations, inertia_history = _lloyd(vectors, centroids)
    names = _unique_names([_name_centroid(c) for c in centroids])
    return IntentModel(centroids=centroids, names=names, seed=seed, k=k,
                       iterations=iterations,
                       inertia_history=tuple(inertia_history))


def classify(model: IntentModel, feature: IntentFeature) -> str:
    """Name of the nearest centroid; ties break to the lowest index."""
    dists = ((model.centroids - feature.vector()) ** 2).sum(axis=1)
    return model.names[int(dists.argmin())]


def base_intention(name: str) -> str:
    """Strip the numeric suffix added to duplicate centroid names."""
    head, _, tail = name.rpartition(" ")
    return head if head and tail.isdigit() else name


def _action_band(ego_speed: float, ego_accel: float) -> str:
    if ego_speed < ACTION_STOPPED_BELOW_MS:
        return "stopped"
    if ego_accel > ACTION_ACCEL_ABOVE:
        return "accelerating"
    if ego_accel < ACTION_BRAKE_BELOW:
        return "braking"
    return "cruising"


def render_command(intention: str, ego_speed: float, ego_accel: float) -> CommandText:
    """Deterministic template lookup for a (goal, current action) pair."""
    goals = _templates()["goals"]
    base = base_intention(intention)
    if base not in goals:
        raise ParameterError(f"unknown intention {intention!r}")
    action = _templates()["actions"][_action_band(ego_speed, ego_accel)]
    return CommandText(goal=goals[base], current_action=action)


def parse_command(command: CommandText) -> tuple[str, str]:
    """Invert render_command back to (base intention, action band)."""
    templates = _templates()
    goal_lookup = {phrase: name for name, phrase in templates["goals"].items()}
    action_lookup = {phrase: band for band, phrase in templates["actions"].items()}
    try:
        return goal_lookup[command.goal], action_lookup[command.current_action]
    except KeyError as exc:
        raise ParameterError(f"command text is not from the template table: {exc}")
