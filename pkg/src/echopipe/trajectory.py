"""Speed-profile trajectory modulation.

A trajectory is a polyline of uniformly time-sampled 2D waypoints. The
modulation pipeline never bends the path; it only changes where along
the path the vehicle sits at each timestamp:

1. cumulative arc length along the waypoints,
2. base average speed (total length / duration),
3. an emotion-conditioned speed curve with optional Gaussian jitter,
   a hesitation dip around the midpoint, and hard clipping,
4. trapezoidal integration of that curve into traversed distance,
   normalized to end exactly at the total path length and clamped,
5. piecewise-linear interpolation of new waypoints along the original
   polyline at the scheduled distances.

The whole pipeline is deterministic given the profile's RNG seed: the
jitter is a single ``numpy.random.default_rng(seed).normal(0, sigma, N)``
draw, one value per timestamp.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .arousal import Emotion
from .errors import DegenerateTrajectoryError, ParameterError

#: Distance tolerance for endpoint / on-path guarantees, in meters.
GEOMETRY_TOL = 1e-9


@dataclass(frozen=True)
class Trajectory:
    """Uniformly time-sampled 2D waypoints spanning ``duration`` seconds."""

    points: np.ndarray = field(repr=False)  # (N, 2) meters
    duration: float

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 2:
            raise ParameterError(f"points must be (N, 2), got shape {points.shape}")
        if points.shape[0] < 2:
            raise ParameterError(f"need at least 2 waypoints, got {points.shape[0]}")
        if not np.all(np.isfinite(points)):
            raise ParameterError("waypoints must be finite")
        if not self.duration > 0:
            raise ParameterError(f"duration must be positive, got {self.duration}")
        object.__setattr__(self, "points", points)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def timestamps(self) -> np.ndarray:
        return np.linspace(0.0, self.duration, len(self))


@dataclass(frozen=True)
class ArcLengthTable:
    """Segment geometry and cumulative path length of a trajectory."""

    deltas: np.ndarray       # (N-1, 2) segment vectors
    lengths: np.ndarray      # (N-1,) segment lengths
    cumulative: np.ndarray   # (N,)  running length, starts at 0
    total: float


@dataclass(frozen=True)
class SpeedProfileParams:
    """Shape constants of one emotion's speed curve.

    ``gain`` and ``rate`` parameterize ``v_avg * gain * (1 - exp(-rate t))``;
    ``noise_sigma_ratio`` scales the per-timestamp Gaussian jitter by the
    average speed (0 disables it); speeds are clipped to
    [clip_lo, clip_hi] * v_avg after the optional ``midpoint_dip`` factor
    is applied around the middle waypoint.
    """

    gain: float
    rate: float
    noise_sigma_ratio: float
    clip_lo: float
    clip_hi: float
    midpoint_dip: float | None = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.gain <= 0 or self.rate <= 0:
            raise ParameterError("gain and rate must be positive")
        if not 0 < self.clip_lo < self.clip_hi:
            raise ParameterError(
                f"need 0 < clip_lo < clip_hi, got ({self.clip_lo}, {self.clip_hi})")
        if self.noise_sigma_ratio < 0:
            raise ParameterError("noise_sigma_ratio must be >= 0")


URGENT_PROFILE = SpeedProfileParams(
    gain=1.6, rate=2.0, noise_sigma_ratio=0.03, clip_lo=0.8, clip_hi=1.5)
HESITANT_PROFILE = SpeedProfileParams(
    gain=1.2, rate=1.0, noise_sigma_ratio=0.05, clip_lo=0.1, clip_hi=1.5,
    midpoint_dip=0.6)


def default_profile_params(emotion: Emotion, rng_seed: int = 0) -> SpeedProfileParams:
    """The built-in urgent or hesitant profile constants with a chosen seed."""
    if emotion == Emotion.URGENT:
        return replace(URGENT_PROFILE, rng_seed=rng_seed)
    if emotion == Emotion.HESITANT:
        return replace(HESITANT_PROFILE, rng_seed=rng_seed)
    raise ParameterError(f"no speed profile constants for emotion {emotion!r}")


@dataclass(frozen=True)
class SpeedProfile:
    """Target speed at each trajectory timestamp, in m/s."""

    speeds: np.ndarray  # (N,)
    v_avg: float


@dataclass(frozen=True)
class ReparamSchedule:
    """Distance-along-path schedule derived from a speed profile."""

    dt: float
    interval_speeds: np.ndarray      # (N-1,) trapezoid means
    segment_distances: np.ndarray    # (N-1,)
    cumulative: np.ndarray           # (N,)  raw integrated distance
    normalized: np.ndarray           # (N,)  scaled to end at the path length
    clamped: np.ndarray              # (N,)  clipped into [0, total length]


@dataclass(frozen=True)
class ModulatedTrajectory:
    """Re-timed waypoints on the original path with per-waypoint speeds."""

    points: np.ndarray   # (N, 2)
    speeds: np.ndarray   # (N,)
    emotion: Emotion
    duration: float


def arc_length(traj: Trajectory) -> ArcLengthTable:
    """Cumulative Euclidean path length over the waypoint polyline."""
    deltas = np.diff(traj.points, axis=0)
    lengths = np.hypot(deltas[:, 0], deltas[:, 1])
    cumulative = np.concatenate([[0.0], np.cumsum(lengths)])
    return ArcLengthTable(deltas=deltas, lengths=lengths,
                          cumulative=cumulative, total=float(cumulative[-1]))


def base_speed(table: ArcLengthTable, duration: float) -> float:
    """Average speed: total path length divided by the duration."""
    if not duration > 0:
        raise ParameterError(f"duration must be positive, got {duration}")
    return table.total / duration


def speed_profile(traj: Trajectory, emotion: Emotion,
                  params: SpeedProfileParams | None = None) -> SpeedProfile:
    """Evaluate the emotion's speed curve at every trajectory timestamp.

    ``normal`` yields the identity profile (constant average speed). For
    urgent/hesitant the curve is evaluated at absolute seconds from the
    trajectory start, jitter is added, the hesitation dip (when present)
    scales the three middle samples, and the result is clipped.
    """
    v_avg = base_speed(arc_length(traj), traj.duration)
    n = len(traj)
    if emotion == Emotion.NORMAL:
        return SpeedProfile(speeds=np.full(n, v_avg), v_avg=v_avg)
    if v_avg <= 0.0:
        raise DegenerateTrajectoryError(
            "stationary trajectory has no base speed to modulate")
    if params is None:
        params = default_profile_params(emotion)

    t = traj.timestamps
    speeds = v_avg * params.gain * (1.0 - np.exp(-params.rate * t))
    rng = np.random.default_rng(params.rng_seed)
    speeds = speeds + rng.normal(0.0, params.noise_sigma_ratio * v_avg, n)
    if params.midpoint_dip is not None:
        mid = n // 2
        dip = np.abs(np.arange(n) - mid) <= 1
        speeds[dip] *= params.midpoint_dip
    speeds = np.clip(speeds, params.clip_lo * v_avg, params.clip_hi * v_avg)
    return SpeedProfile(speeds=speeds, v_avg=v_avg)


def reparameterize(traj: Trajectory, profile: SpeedProfile) -> ReparamSchedule:
    """Integrate the profile into a clamped distance-along-path schedule."""
    n = len(traj)
    if profile.speeds.shape != (n,):
        raise ParameterError(
            f"profile length {profile.speeds.shape} does not match {n} waypoints")
    total = arc_length(traj).total
    dt = traj.duration / (n - 1)
    interval_speeds = 0.5 * (profile.speeds[:-1] + profile.speeds[1:])
    segment_distances = interval_speeds * dt
    cumulative = np.concatenate([[0.0], np.cumsum(segment_distances)])
    peak = cumulative.max()
    if peak <= 0.0:
        raise DegenerateTrajectoryError("all-zero speed profile cannot be scheduled")
    normalized = total * cumulative / peak
    clamped = np.clip(normalized, 0.0, total)
    return ReparamSchedule(dt=dt, interval_speeds=interval_speeds,
                           segment_distances=segment_distances,
                           cumulative=cumulative, normalized=normalized,
                           clamped=clamped)


def interpolate(traj: Trajectory, schedule: ReparamSchedule,
                profile: SpeedProfile | None = None,
                emotion: Emotion = Emotion.NORMAL) -> ModulatedTrajectory:
    """Place new waypoints on the original polyline at scheduled distances.

    Zero-length segments (repeated waypoints) are dropped from the knot
    table so interpolation always works against strictly increasing arc
    lengths. A fully stationary trajectory is returned unchanged.
    """
    table = arc_length(traj)
    n = len(traj)
    speeds = profile.speeds.copy() if profile is not None else np.zeros(n)
    if table.total == 0.0:
        return ModulatedTrajectory(points=traj.points.copy(),
                                   speeds=np.zeros(n), emotion=emotion,
                                   duration=traj.duration)
    keep = np.concatenate([[True], table.lengths > 0.0])
    knots = table.cumulative[keep]
    xs = np.interp(schedule.clamped, knots, traj.points[keep, 0])
    ys = np.interp(schedule.clamped, knots, traj.points[keep, 1])
    return ModulatedTrajectory(points=np.column_stack([xs, ys]), speeds=speeds,
                               emotion=emotion, duration=traj.duration)


def point_to_polyline_distance(point, points) -> float:
    """Distance from a point to the nearest segment of a waypoint polyline."""
    p = np.asarray(point, dtype=np.float64)
    pts = np.asarray(points, dtype=np.float64)
    a, b = pts[:-1], pts[1:]
    ab = b - a
    seg_sq = (ab ** 2).sum(axis=1)
    t = np.zeros(len(a))
    nonzero = seg_sq > 0.0
    t[nonzero] = np.clip(((p - a[nonzero]) * ab[nonzero]).sum(axis=1)
                         / seg_sq[nonzero], 0.0, 1.0)
    closest = a + t[:, None] * ab
    return float(np.hypot(*(closest - p).T).min())


def modulate(traj: Trajectory, emotion: Emotion,
             params: SpeedProfileParams | None = None) -> ModulatedTrajectory:
    """Full pipeline: arc length -> profile -> schedule -> interpolation."""
    table = arc_length(traj)
    if table.total == 0.0:
        return ModulatedTrajectory(points=traj.points.copy(),
                                   speeds=np.zeros(len(traj)), emotion=emotion,
                                   duration=traj.duration)
    profile = speed_profile(traj, emotion, params)
    schedule = reparameterize(traj, profile)
    return interpolate(traj, schedule, profile, emotion)
