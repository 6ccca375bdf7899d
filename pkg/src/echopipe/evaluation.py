"""Open-loop planning metrics: L2 error and collision rate.

Trajectories are compared waypoint-by-waypoint at the 2 Hz horizon
indices (1 s -> index 1, 2 s -> index 3, 3 s -> index 5). The L2 value
at a horizon is the cumulative mean of the per-waypoint distances up to
and including that index; a single-point variant (just the distance at
the horizon index) is available behind a flag since both conventions
appear in the wild. Collisions place an ego box at every planned
waypoint, with its yaw taken from finite differences, and test overlap
against the per-step agent boxes with a separating-axis check over the
four candidate rectangle axes (touching counts as overlap).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParameterError

PLAN_STEPS = 6
HORIZON_INDICES = {1: 1, 2: 3, 3: 5}
HORIZON_SECONDS = (1, 2, 3)

#: Default ego footprint, meters (a mid-size car), configurable per call.
EGO_LENGTH = 4.08
EGO_WIDTH = 1.73

#: Published open-loop numbers of the fine-tuned audio-conditioned model,
#: carried in reports as reference context only. Reproducing them requires
#: that trained model, which is outside this toolkit.
REFERENCE_OPEN_LOOP = {
    "l2_m": {"1s": 0.46, "2s": 0.52, "3s": 0.74, "avg": 0.58},
    "collision_rate_pct": {"1s": 0.00, "2s": 0.12, "3s": 0.22, "avg": 0.11},
    "note": ("reference metadata from the original fine-tuned model "
             "evaluation; not computed or claimed by this toolkit"),
}


@dataclass(frozen=True)
class ObbBox:
    """Oriented rectangle: center, yaw, and side lengths in meters."""

    cx: float
    cy: float
    yaw: float
    length: float
    width: float

    def __post_init__(self):
        if self.length <= 0 or self.width <= 0:
            raise ParameterError(
                f"box sides must be positive, got {self.length} x {self.width}")

    def corners(self) -> np.ndarray:
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        hl, hw = self.length / 2.0, self.width / 2.0
        local = np.array([[hl, hw], [hl, -hw], [-hl, -hw], [-hl, hw]])
        rot = np.array([[c, -s], [s, c]])
        return local @ rot.T + np.array([self.cx, self.cy])


def obb_overlap(a: ObbBox, b: ObbBox) -> bool:
    """Separating-axis overlap test; touching edges count as overlap."""
    corners_a = a.corners()
    corners_b = b.corners()
    for yaw in (a.yaw, b.yaw):
        c, s = math.cos(yaw), math.sin(yaw)
        for axis in ((c, s), (-s, c)):
            proj_a = corners_a @ axis
            proj_b = corners_b @ axis
            if proj_a.min() > proj_b.max() or proj_b.min() > proj_a.max():
                return False
    return True


def l2_error(planned, truth, mode: str = "cumulative") -> dict[int, float]:
    """Per-horizon L2 distances between two 6-waypoint trajectories.

    ``cumulative`` (the default) averages the per-waypoint distances up
    to each horizon index; ``endpoint`` reports the single distance at
    the horizon index.
    """
    planned = np.asarray(planned, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if planned.shape != (PLAN_STEPS, 2) or truth.shape != (PLAN_STEPS, 2):
        raise ParameterError(
            f"need ({PLAN_STEPS}, 2) trajectories, got {planned.shape} vs {truth.shape}")
    if mode not in ("cumulative", "endpoint"):
        raise ParameterError(f"unknown L2 mode {mode!r}")
    distances = np.hypot(*(planned - truth).T)
    out = {}
    for horizon, idx in HORIZON_INDICES.items():
        if mode == "cumulative":
            out[horizon] = float(distances[: idx + 1].mean())
        else:
            out[horizon] = float(distances[idx])
    return out


def ego_yaws(points) -> np.ndarray:
    """Heading at each waypoint from finite differences.

    The last segment's yaw repeats for the final waypoint; stationary
    segments inherit the previous yaw (zero when leading).
    """
    points = np.asarray(points, dtype=np.float64)
    yaws = np.zeros(points.shape[0])
    current = 0.0
    for i in range(points.shape[0] - 1):
        delta = points[i + 1] - points[i]
        if np.hypot(*delta) > 1e-9:
            current = math.atan2(delta[1], delta[0])
        yaws[i] = current
    yaws[-1] = current
    return yaws


def collision_flags(planned, agents_per_step,
                    ego_dims: tuple[float, float] = (EGO_LENGTH, EGO_WIDTH)) -> dict[int, bool]:
    """Whether the plan collides by each horizon.

    ``agents_per_step`` holds one list of ObbBox per planned step. A plan
    collides at horizon h when any step up to h's index overlaps any
    agent box of the same step; a collision therefore persists through
    the later horizons.
    """
    planned = np.asarray(planned, dtype=np.float64)
    if planned.shape != (PLAN_STEPS, 2):
        raise ParameterError(f"need ({PLAN_STEPS}, 2) waypoints, got {planned.shape}")
    if len(agents_per_step) != PLAN_STEPS:
        raise ParameterError(
            f"need {PLAN_STEPS} agent steps, got {len(agents_per_step)}")
    length, width = ego_dims
    yaws = ego_yaws(planned)
    step_hits = []
    for i in range(PLAN_STEPS):
        ego = ObbBox(planned[i, 0], planned[i, 1], yaws[i], length, width)
        step_hits.append(any(obb_overlap(ego, agent) for agent in agents_per_step[i]))
    flags = {}
    for horizon, idx in HORIZON_INDICES.items():
        flags[horizon] = any(step_hits[: idx + 1])
    return flags


def collision_rate(planned, agents_per_step,
                   ego_dims: tuple[float, float] = (EGO_LENGTH, EGO_WIDTH)) -> dict[int, float]:
    """Single-sample collision rate in percent (0 or 100 per horizon)."""
    flags = collision_flags(planned, agents_per_step, ego_dims)
    return {h: 100.0 * flags[h] for h in HORIZON_SECONDS}


@dataclass(frozen=True)
class EvalReport:
    """Aggregated open-loop metrics over the matched records."""

    l2: dict[int, float]
    l2_avg: float
    collision: dict[int, float]
    collision_avg: float
    sample_count: int
    unmatched: tuple[str, ...]
    l2_mode: str = "cumulative"

    def to_dict(self) -> dict:
        return {
            "sample_count": self.sample_count,
            "l2_mode": self.l2_mode,
            "l2_m": {f"{h}s": self.l2[h] for h in HORIZON_SECONDS},
            "l2_avg_m": self.l2_avg,
            "collision_rate_pct": {f"{h}s": self.collision[h] for h in HORIZON_SECONDS},
            "collision_rate_avg_pct": self.collision_avg,
            "unmatched_record_ids": list(self.unmatched),
            "reference_metadata": REFERENCE_OPEN_LOOP,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def evaluate(records, predictions: dict[str, np.ndarray],
             ego_dims: tuple[float, float] = (EGO_LENGTH, EGO_WIDTH),
             l2_mode: str = "cumulative",
             per_record_path: str | Path | None = None) -> EvalReport:
    """Score predictions against dataset records matched by record id.

    ``records`` is an iterable of dataset records (see the dataset
    module); predictions map record_id to a (6, 2) trajectory. Prediction
    ids without a matching record are listed and excluded.
    """
    by_id = {rec.record_id: rec for rec in records}
    unmatched = tuple(sorted(set(predictions) - set(by_id)))
    matched = [rid for rid in by_id if rid in predictions]

    l2_rows: list[dict[int, float]] = []
    col_rows: list[dict[int, bool]] = []
    csv_rows = []
    for rid in matched:
        rec = by_id[rid]
        planned = np.asarray(predictions[rid], dtype=np.float64)
        truth = np.asarray(rec.answer_points, dtype=np.float64)
        agents = [[ObbBox(*row) for row in step] for step in rec.agents]
        l2_row = l2_error(planned, truth, mode=l2_mode)
        col_row = collision_flags(planned, agents, ego_dims)
        l2_rows.append(l2_row)
        col_rows.append(col_row)
        csv_rows.append([rid] + [l2_row[h] for h in HORIZON_SECONDS]
                        + [int(col_row[h]) for h in HORIZON_SECONDS])

    if l2_rows:
        l2 = {h: float(np.mean([row[h] for row in l2_rows])) for h in HORIZON_SECONDS}
        collision = {h: float(100.0 * np.mean([row[h] for row in col_rows]))
                     for h in HORIZON_SECONDS}
    else:
        l2 = {h: 0.0 for h in HORIZON_SECONDS}
        collision = {h: 0.0 for h in HORIZON_SECONDS}

    if per_record_path is not None:
        with open(per_record_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["record_id", "l2_1s", "l2_2s", "l2_3s",
                             "collides_1s", "collides_2s", "collides_3s"])
            writer.writerows(csv_rows)

    return EvalReport(
        l2=l2, l2_avg=float(np.mean([l2[h] for h in HORIZON_SECONDS])),
        collision=collision,
        collision_avg=float(np.mean([collision[h] for h in HORIZON_SECONDS])),
        sample_count=len(matched), unmatched=unmatched, l2_mode=l2_mode)


def load_predictions(path: str | Path) -> dict[str, np.ndarray]:
    """Read a predictions JSONL file: {"record_id": ..., "trajectory": [[x, y] * 6]}."""
    predictions = {}
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            try:
                rid = row["record_id"]
                traj = np.asarray(row["trajectory"], dtype=np.float64)
            except (KeyError, ValueError) as exc:
                raise ParameterError(f"bad prediction on line {line_no}: {exc}")
            if traj.shape != (PLAN_STEPS, 2):
                raise ParameterError(
                    f"prediction {rid!r} must be ({PLAN_STEPS}, 2), got {traj.shape}")
            predictions[rid] = traj
    return predictions
