import math

import numpy as np
import pytest

from echopipe.arousal import Emotion
from echopipe.errors import DegenerateTrajectoryError, ParameterError
from echopipe.trajectory import (HESITANT_PROFILE, URGENT_PROFILE,
                                 SpeedProfile, SpeedProfileParams, Trajectory,
                                 arc_length, base_speed,
                                 default_profile_params, interpolate,
                                 modulate, reparameterize, speed_profile)
from oracles import modulate_bruteforce, point_polyline_distance, random_trajectory


def straight_line(total=30.0, n=7, duration=3.0):
    points = np.column_stack([np.zeros(n), np.linspace(0.0, total, n)])
    return Trajectory(points, duration)


def noiseless(emotion, seed=0):
    base = default_profile_params(emotion, rng_seed=seed)
    return SpeedProfileParams(gain=base.gain, rate=base.rate,
                              noise_sigma_ratio=0.0, clip_lo=base.clip_lo,
                              clip_hi=base.clip_hi, midpoint_dip=base.midpoint_dip,
                              rng_seed=seed)


# --- arc length and base speed ------------------------------------------

def test_arc_length_unit_segments():
    table = arc_length(Trajectory(np.array([[0, 0], [0, 1], [0, 2]]), 1.0))
    np.testing.assert_allclose(table.cumulative, [0.0, 1.0, 2.0])
    assert table.total == 2.0


def test_arc_length_degenerate_all_identical():
    table = arc_length(Trajectory(np.array([[3, 4]] * 5), 1.0))
    np.testing.assert_allclose(table.cumulative, 0.0)
    assert table.total == 0.0


def test_arc_length_345_triangle():
    table = arc_length(Trajectory(np.array([[0, 0], [3, 4]]), 1.0))
    assert table.total == 5.0


def test_trajectory_needs_two_points():
    with pytest.raises(ParameterError):
        Trajectory(np.array([[0.0, 0.0]]), 1.0)


def test_base_speed_arithmetic():
    assert base_speed(arc_length(straight_line(30.0)), 3.0) == pytest.approx(10.0)
    assert base_speed(arc_length(Trajectory(np.array([[1, 1]] * 3), 4.0)), 4.0) == 0.0
    assert base_speed(arc_length(Trajectory(np.array([[0, 0], [2, 0]]), 4.0)),
                      4.0) == pytest.approx(0.5)


def test_base_speed_rejects_nonpositive_duration():
    with pytest.raises(ParameterError):
        base_speed(arc_length(straight_line()), 0.0)


# --- speed profiles -----------------------------------------------------

def test_urgent_profile_start_is_clipped_to_floor():
    traj = straight_line(30.0, n=7, duration=3.0)
    prof = speed_profile(traj, Emotion.URGENT, noiseless(Emotion.URGENT))
    v_avg = 10.0
    # raw value at t=0 is zero, the clip floor pulls it to 0.8 v_avg
    assert prof.speeds[0] == pytest.approx(0.8 * v_avg)


def test_urgent_profile_saturates_at_ceiling():
    traj = straight_line(30.0, n=7, duration=3.0)
    prof = speed_profile(traj, Emotion.URGENT, noiseless(Emotion.URGENT))
    v_avg = 10.0
    raw_end = 1.6 * v_avg * (1.0 - math.exp(-2.0 * 3.0))
    assert raw_end == pytest.approx(1.596 * v_avg, abs=0.01 * v_avg)
    assert prof.speeds[-1] == pytest.approx(1.5 * v_avg)


def test_hesitant_midpoint_dip_value():
    traj = straight_line(30.0, n=7, duration=3.0)
    prof = speed_profile(traj, Emotion.HESITANT, noiseless(Emotion.HESITANT))
    v_avg = 10.0
    expected = 0.6 * 1.2 * v_avg * (1.0 - math.exp(-1.5))
    assert expected == pytest.approx(0.559 * v_avg, abs=0.001 * v_avg)
    assert prof.speeds[3] == pytest.approx(expected)


def test_hesitant_dip_covers_three_middle_indices():
    traj = straight_line(30.0, n=7, duration=3.0)
    dipped = speed_profile(traj, Emotion.HESITANT, noiseless(Emotion.HESITANT))
    params = noiseless(Emotion.HESITANT)
    no_dip = SpeedProfileParams(gain=params.gain, rate=params.rate,
                                noise_sigma_ratio=0.0, clip_lo=params.clip_lo,
                                clip_hi=params.clip_hi, midpoint_dip=None)
    plain = speed_profile(traj, Emotion.HESITANT, no_dip)
    affected = np.flatnonzero(~np.isclose(dipped.speeds, plain.speeds))
    assert set(affected) <= {2, 3, 4}


def test_normal_profile_is_constant_average():
    traj = straight_line(30.0, n=7, duration=3.0)
    prof = speed_profile(traj, Emotion.NORMAL)
    np.testing.assert_allclose(prof.speeds, 10.0)


def test_stationary_trajectory_profile_is_degenerate():
    traj = Trajectory(np.array([[2.0, 2.0]] * 4), 2.0)
    with pytest.raises(DegenerateTrajectoryError):
        speed_profile(traj, Emotion.URGENT)


def test_speeds_respect_clip_bounds_for_any_noise_draw():
    traj = straight_line(25.0, n=12, duration=4.0)
    for seed in range(25):
        for emotion in (Emotion.URGENT, Emotion.HESITANT):
            params = default_profile_params(emotion, rng_seed=seed)
            prof = speed_profile(traj, emotion, params)
            v_avg = prof.v_avg
            assert np.all(prof.speeds >= params.clip_lo * v_avg - 1e-12)
            assert np.all(prof.speeds <= params.clip_hi * v_avg + 1e-12)


# --- reparameterization -------------------------------------------------

def test_constant_profile_gives_uniform_progress():
    traj = straight_line(30.0, n=7, duration=3.0)
    schedule = reparameterize(traj, speed_profile(traj, Emotion.NORMAL))
    np.testing.assert_allclose(schedule.clamped, 30.0 * np.arange(7) / 6.0,
                               atol=1e-12)


def test_schedule_endpoints_are_pinned():
    rng = np.random.default_rng(7)
    for _ in range(20):
        points, duration = random_trajectory(rng)
        traj = Trajectory(points, duration)
        if arc_length(traj).total == 0.0:
            continue
        emotion = Emotion.URGENT if rng.random() < 0.5 else Emotion.HESITANT
        prof = speed_profile(traj, emotion,
                             default_profile_params(emotion, int(rng.integers(1 << 30))))
        schedule = reparameterize(traj, prof)
        assert schedule.clamped[0] == 0.0
        assert schedule.clamped[-1] == pytest.approx(arc_length(traj).total, abs=1e-12)


def test_urgent_leads_hesitant_in_first_half():
    traj = straight_line(30.0, n=7, duration=3.0)
    urg = reparameterize(traj, speed_profile(traj, Emotion.URGENT,
                                             noiseless(Emotion.URGENT)))
    hes = reparameterize(traj, speed_profile(traj, Emotion.HESITANT,
                                             noiseless(Emotion.HESITANT)))
    for i in range(7 // 2):
        assert urg.clamped[i] >= hes.clamped[i] - 1e-12


def test_zero_profile_is_degenerate():
    traj = straight_line()
    prof = SpeedProfile(speeds=np.zeros(7), v_avg=10.0)
    with pytest.raises(DegenerateTrajectoryError):
        reparameterize(traj, prof)


def test_profile_length_mismatch_rejected():
    traj = straight_line(n=7)
    with pytest.raises(ParameterError):
        reparameterize(traj, SpeedProfile(speeds=np.ones(5), v_avg=1.0))


# --- interpolation ------------------------------------------------------

def test_interpolate_knot_identity():
    traj = Trajectory(np.array([[0, 0], [1, 0], [1, 2]]), 3.0)
    table = arc_length(traj)
    schedule = reparameterize(traj, speed_profile(traj, Emotion.NORMAL))
    object.__setattr__(schedule, "clamped", table.cumulative.copy())
    out = interpolate(traj, schedule)
    np.testing.assert_allclose(out.points, traj.points, atol=1e-12)


def test_interpolate_linear_case():
    traj = Trajectory(np.array([[0, 0], [0, 15], [0, 30]]), 3.0)
    schedule = reparameterize(traj, speed_profile(traj, Emotion.NORMAL))
    out = interpolate(traj, schedule)
    np.testing.assert_allclose(out.points, [[0, 0], [0, 15], [0, 30]], atol=1e-12)


def test_interpolate_l_shaped_midpoint():
    traj = Trajectory(np.array([[0.0, 0.0], [10.0, 0.0], [10.0, 10.0]]), 2.0)
    prof = SpeedProfile(speeds=np.full(3, 10.0), v_avg=10.0)
    schedule = reparameterize(traj, prof)
    # uniform progress puts the middle waypoint at arc length 10; steer it
    # to 15 by scheduling three-quarters progress at the midpoint
    object.__setattr__(schedule, "clamped", np.array([0.0, 15.0, 20.0]))
    out = interpolate(traj, schedule)
    np.testing.assert_allclose(out.points[1], [10.0, 5.0], atol=1e-12)


def test_modulate_stationary_returns_input():
    traj = Trajectory(np.array([[5.0, 5.0]] * 4), 2.0)
    out = modulate(traj, Emotion.URGENT)
    np.testing.assert_allclose(out.points, traj.points)
    np.testing.assert_allclose(out.speeds, 0.0)


def test_interpolate_skips_zero_length_segments():
    points = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [3.0, 0.0]])
    traj = Trajectory(points, 3.0)
    out = modulate(traj, Emotion.NORMAL)
    np.testing.assert_allclose(out.points,
                               np.column_stack([np.linspace(0, 3, 4), np.zeros(4)]),
                               atol=1e-12)


# --- full pipeline ------------------------------------------------------

def test_modulate_normal_resamples_at_constant_speed():
    traj = straight_line(30.0, n=7, duration=3.0)
    out = modulate(traj, Emotion.NORMAL)
    np.testing.assert_allclose(out.points, traj.points, atol=1e-12)
    np.testing.assert_allclose(out.speeds, 10.0)


def test_modulate_urgent_progress_shape_on_straight_line():
    # Normalization pins total progress to the path length, so only the
    # profile's shape matters: the rising urgent curve is back-loaded
    # against the uniform input, yet still ahead of the hesitant curve.
    traj = straight_line(30.0, n=7, duration=3.0)
    urgent = modulate(traj, Emotion.URGENT, noiseless(Emotion.URGENT))
    hesitant = modulate(traj, Emotion.HESITANT, noiseless(Emotion.HESITANT))
    assert np.all(urgent.points[1:-1, 1] < traj.points[1:-1, 1])
    assert np.all(urgent.points[1:-1, 1] > hesitant.points[1:-1, 1])


def test_modulate_is_deterministic_per_seed():
    traj = straight_line(20.0, n=9, duration=4.5)
    a = modulate(traj, Emotion.HESITANT, default_profile_params(Emotion.HESITANT, 99))
    b = modulate(traj, Emotion.HESITANT, default_profile_params(Emotion.HESITANT, 99))
    assert np.array_equal(a.points, b.points)
    assert np.array_equal(a.speeds, b.speeds)
    c = modulate(traj, Emotion.HESITANT, default_profile_params(Emotion.HESITANT, 100))
    assert not np.array_equal(a.points, c.points)


def _oracle_args(emotion, params):
    return dict(emotion=emotion.value, gain=params.gain, rate=params.rate,
                sigma_ratio=params.noise_sigma_ratio, clip_lo=params.clip_lo,
                clip_hi=params.clip_hi, midpoint_dip=params.midpoint_dip,
                seed=params.rng_seed)


def test_pipeline_matches_bruteforce_oracle_on_random_trajectories():
    rng = np.random.default_rng(2024)
    checked = 0
    for case in range(250):
        points, duration = random_trajectory(rng)
        traj = Trajectory(points, duration)
        emotion = (Emotion.URGENT, Emotion.HESITANT)[case % 2]
        params = default_profile_params(emotion, rng_seed=case)
        if arc_length(traj).total == 0.0:
            continue
        out = modulate(traj, emotion, params)
        expected_pts, expected_speeds = modulate_bruteforce(
            points, duration, **_oracle_args(emotion, params))
        np.testing.assert_allclose(out.points, expected_pts, atol=1e-9)
        np.testing.assert_allclose(out.speeds, expected_speeds, atol=1e-9)
        checked += 1
    assert checked > 200


def test_geometry_invariants_on_random_trajectories():
    rng = np.random.default_rng(77)
    for case in range(150):
        points, duration = random_trajectory(rng)
        traj = Trajectory(points, duration)
        emotion = (Emotion.URGENT, Emotion.HESITANT, Emotion.NORMAL)[case % 3]
        params = (default_profile_params(emotion, rng_seed=case)
                  if emotion != Emotion.NORMAL else None)
        out = modulate(traj, emotion, params)
        # endpoints preserved
        np.testing.assert_allclose(out.points[0], traj.points[0], atol=1e-9)
        np.testing.assert_allclose(out.points[-1], traj.points[-1], atol=1e-9)
        # every waypoint on the source polyline
        for p in out.points:
            assert point_polyline_distance(tuple(p), [tuple(q) for q in points]) <= 1e-9
        # progress along the path is monotone
        if arc_length(traj).total > 0.0:
            prof = speed_profile(traj, emotion, params)
            schedule = reparameterize(traj, prof)
            assert np.all(np.diff(schedule.clamped) >= -1e-12)
