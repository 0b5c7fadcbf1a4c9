"""Speed-profile construction, mode selection, and both planners."""
import math

import numpy as np
import pytest

from ecosplit.planner import (
    Mode,
    PlannerContext,
    SpeedProfile,
    plan_baseline_profile,
    plan_eco_profile,
    plan_terminal_stop,
    select_mode,
    solve_pass_leg,
    solve_stop_leg,
    trig_segment,
)
from ecosplit.traffic import GreenWindow, SignalTiming

A_MAX = 1.5
A_MIN = -2.5


def _ctx(t0=0.0, pos=0.0, v=15.0, bar=300.0, vlim=15.0, window=None):
    return PlannerContext(
        t0=t0,
        current_position=pos,
        current_speed=v,
        stopbar_position=bar,
        speed_limit=vlim,
        green_window=window,
        a_max=A_MAX,
        a_min=A_MIN,
    )


# ------------------------------------------------------------
# segment algebra
# ------------------------------------------------------------

def test_trig_segment_trapezoid_distance_is_exact():
    # the 1 Hz half-cosine samples integrate to T*(v0+vf)/2 under the
    # trapezoid rule because the cosine part telescopes to zero
    rng = np.random.default_rng(7)
    for _ in range(200):
        v0 = float(rng.uniform(0.0, 30.0))
        vf = float(rng.uniform(0.0, 30.0))
        n = int(rng.integers(1, 40))
        v = trig_segment(v0, vf, n)
        assert len(v) == n + 1
        assert v[0] == v0 and v[-1] == vf
        d = float(np.trapezoid(v))
        want = n * (v0 + vf) / 2.0
        assert abs(d - want) <= 1e-9 * max(1.0, abs(want))


def test_trig_segment_is_monotone_between_endpoints():
    v = trig_segment(5.0, 12.0, 9)
    assert np.all(np.diff(v) >= 0.0)
    w = trig_segment(12.0, 5.0, 9)
    assert np.all(np.diff(w) <= 0.0)


def test_trig_segment_rejects_bad_arguments():
    with pytest.raises(ValueError):
        trig_segment(-1.0, 5.0, 4)
    with pytest.raises(ValueError):
        trig_segment(5.0, 5.0, 0)
    with pytest.raises(ValueError):
        trig_segment(5.0, 5.0, 2.5)


def test_speed_profile_bookkeeping():
    p = SpeedProfile(10.0, np.array([0.0, 2.0, 4.0, 4.0]), [Mode.SPEED_UP] * 4)
    assert list(p.times()) == [10.0, 11.0, 12.0, 13.0]
    assert p.duration == 3.0
    assert list(p.distance_trace()) == [0.0, 1.0, 4.0, 8.0]
    assert p.total_distance == 8.0


def test_speed_profile_validate_catches_violations():
    good = SpeedProfile(0.0, np.array([10.0, 10.0, 10.0]), [Mode.CRUISE] * 3)
    good.validate(10.0, A_MAX, A_MIN, route_length=20.0)
    with pytest.raises(ValueError, match="above limit"):
        good.validate(9.0, A_MAX, A_MIN)
    fast = SpeedProfile(0.0, np.array([0.0, 3.0]), [Mode.SPEED_UP] * 2)
    with pytest.raises(ValueError, match="comfort"):
        fast.validate(10.0, 1.5, A_MIN)
    hard = SpeedProfile(0.0, np.array([10.0, 6.0]), [Mode.SLOW_DOWN] * 2)
    with pytest.raises(ValueError, match="deceleration"):
        hard.validate(10.0, A_MAX, -2.5)
    with pytest.raises(ValueError, match="close route"):
        good.validate(10.0, A_MAX, A_MIN, route_length=25.0)
    neg = SpeedProfile(0.0, np.array([1.0, -0.5]), [Mode.SLOW_DOWN] * 2)
    with pytest.raises(ValueError, match="negative"):
        neg.validate(10.0, A_MAX, A_MIN)


def test_solve_pass_leg_meets_distance_and_horizon_exactly():
    rng = np.random.default_rng(11)
    hits = 0
    for _ in range(300):
        v0 = float(rng.uniform(3.0, 16.0))
        vlim = float(rng.uniform(max(8.0, v0), 18.0))
        horizon = int(rng.integers(5, 60))
        d = float(rng.uniform(0.75, 1.0)) * vlim * horizon
        seg = solve_pass_leg(v0, d, horizon, 0.7 * vlim, vlim, A_MAX, A_MIN)
        if seg is None:
            continue
        hits += 1
        speeds = _render_segments(seg)
        p = SpeedProfile(0.0, speeds, [Mode.CRUISE] * len(speeds))
        assert p.duration == horizon
        assert abs(p.total_distance - d) <= 1e-9 * d
        p.validate(vlim, A_MAX, A_MIN)
    assert hits >= 100   # the sweep must actually exercise the solver


def test_solve_pass_leg_returns_none_when_hopeless():
    # cannot cover 600 m in 10 s under a 15 m/s limit
    assert solve_pass_leg(15.0, 600.0, 10, 10.5, 15.0, A_MAX, A_MIN) is None


def test_solve_stop_leg_lands_exactly_at_zero():
    rng = np.random.default_rng(13)
    for _ in range(100):
        v0 = float(rng.uniform(2.0, 17.0))
        d_min = 1.3 * math.pi * v0 * v0 / (4.0 * -A_MIN)   # comfortable stop envelope
        d = float(rng.uniform(max(40.0, d_min), max(80.0, d_min) + 420.0))
        seg, arrival = solve_stop_leg(v0, d, 17.0, A_MAX, A_MIN)
        speeds = _render_segments(seg)
        assert len(speeds) == arrival + 1
        assert speeds[-1] == 0.0
        p = SpeedProfile(0.0, speeds, [Mode.SLOW_DOWN] * len(speeds))
        assert abs(p.total_distance - d) <= 1e-9 * d
        p.validate(17.0, A_MAX, A_MIN)


def test_solve_stop_leg_rejects_nonpositive_distance():
    with pytest.raises(ValueError):
        solve_stop_leg(10.0, 0.0, 15.0, A_MAX, A_MIN)


def _render_segments(segments):
    parts = [np.array([segments[0][1]])]
    for kind, a, b, n in segments:
        if kind == "ramp":
            parts.append(trig_segment(a, b, n)[1:])
        else:
            parts.append(np.full(n, a))
    return np.concatenate(parts)


# ------------------------------------------------------------
# mode selection
# ------------------------------------------------------------

def test_mode_cruise_when_current_arrival_fits():
    # 300 m at 15 m/s arrives at t0+20, inside the window
    ctx = _ctx(t0=100.0, window=GreenWindow(115.0, 125.0))
    assert select_mode(ctx) is Mode.CRUISE


def test_mode_slow_down_when_too_early():
    ctx = _ctx(t0=100.0, window=GreenWindow(124.0, 129.0))
    assert select_mode(ctx) is Mode.SLOW_DOWN


def test_mode_speed_up_when_below_floor_or_late():
    slow = _ctx(t0=0.0, v=8.0, window=GreenWindow(24.0, 29.0))
    assert select_mode(slow) is Mode.SPEED_UP
    late = _ctx(t0=0.0, v=12.0, window=GreenWindow(18.0, 21.0))
    assert select_mode(late) is Mode.SPEED_UP


def test_mode_stop_when_no_window_is_reachable():
    soon = _ctx(t0=0.0, window=GreenWindow(5.0, 8.0))
    assert select_mode(soon) is Mode.STOP
    assert select_mode(_ctx(window=None)) is Mode.STOP


# ------------------------------------------------------------
# eco planner
# ------------------------------------------------------------

def test_eco_cruise_keeps_speed_and_hits_the_bar():
    ctx = _ctx(t0=100.0, window=GreenWindow(115.0, 125.0))
    leg = plan_eco_profile(ctx)
    assert leg.mode is Mode.CRUISE
    assert leg.crossing_time == 120.0
    assert np.all(leg.profile.speeds == 15.0)
    assert abs(leg.profile.total_distance - 300.0) <= 1e-9 * 300.0
    assert leg.end_position == 300.0
    assert leg.end_speed == 15.0


def test_eco_slow_down_targets_the_window_midpoint():
    # four feasible arrivals (24..27); the midpoint fraction lands on 26
    ctx = _ctx(t0=100.0, window=GreenWindow(124.0, 129.0))
    leg = plan_eco_profile(ctx)
    assert leg.mode is Mode.SLOW_DOWN
    assert leg.crossing_time == 126.0
    assert ctx.green_window.contains(leg.crossing_time)
    assert 0.7 * 15.0 - 1e-9 <= leg.end_speed < 15.0
    assert abs(leg.profile.total_distance - 300.0) <= 1e-9 * 300.0
    leg.profile.validate(15.0, A_MAX, A_MIN)


def test_eco_speed_up_raises_speed_into_window():
    ctx = _ctx(t0=0.0, v=8.0, window=GreenWindow(24.0, 29.0))
    leg = plan_eco_profile(ctx)
    assert leg.mode is Mode.SPEED_UP
    assert ctx.green_window.contains(leg.crossing_time)
    assert leg.end_speed > 8.0
    leg.profile.validate(15.0, A_MAX, A_MIN)


def test_eco_stop_dwells_until_green_onset():
    sig = SignalTiming(cycle_length=60.0, green_start=30.0, green_duration=30.0)
    ctx = _ctx(t0=0.0, window=None)
    leg = plan_eco_profile(ctx, signal=sig)
    assert leg.mode is Mode.STOP
    assert leg.end_speed == 0.0
    assert leg.profile.speeds[-1] == 0.0
    assert sig.is_green(leg.crossing_time)
    assert leg.crossing_time == ctx.t0 + leg.profile.duration
    assert abs(leg.profile.total_distance - 300.0) <= 1e-9 * 300.0
    leg.profile.validate(15.0, A_MAX, A_MIN)


def test_eco_window_fraction_bounds():
    ctx = _ctx(t0=100.0, window=GreenWindow(124.0, 129.0))
    early = plan_eco_profile(ctx, window_fraction=0.0)
    late = plan_eco_profile(ctx, window_fraction=1.0)
    assert early.crossing_time == 124.0
    assert late.crossing_time == 127.0
    with pytest.raises(ValueError):
        plan_eco_profile(ctx, window_fraction=1.5)


def test_eco_random_legs_close_distance_and_respect_windows():
    rng = np.random.default_rng(23)
    for _ in range(60):
        vlim = float(rng.uniform(12.0, 18.0))
        v0 = float(rng.uniform(0.5, 1.0)) * vlim
        d = float(rng.uniform(150.0, 600.0))
        cycle = float(rng.integers(50, 100))
        green = float(rng.integers(20, 40))
        start = float(rng.integers(0, int(cycle - green) + 1))
        sig = SignalTiming(cycle, start, green)
        c = int(rng.integers(0, 3))
        onset, end = sig.green_interval(c)
        window = GreenWindow(onset, end)
        ctx = _ctx(t0=0.0, v=v0, bar=d, vlim=vlim, window=window)
        leg = plan_eco_profile(ctx, signal=sig)
        leg.profile.validate(vlim, A_MAX, A_MIN)
        assert abs(leg.profile.total_distance - d) <= 1e-6
        assert leg.end_position == d
        if leg.mode is Mode.STOP:
            assert sig.is_green(leg.crossing_time)
        else:
            assert window.contains(leg.crossing_time)


def test_terminal_stop_reaches_standstill_at_route_end():
    ctx = _ctx(t0=50.0, v=12.0, bar=260.0)
    leg = plan_terminal_stop(ctx)
    assert leg.end_speed == 0.0
    assert leg.profile.speeds[-1] == 0.0
    assert abs(leg.profile.total_distance - 260.0) <= 1e-9 * 260.0
    assert leg.crossing_time == 50.0 + leg.profile.duration
    leg.profile.validate(15.0, A_MAX, A_MIN)


# ------------------------------------------------------------
# baseline planner
# ------------------------------------------------------------

def test_baseline_cruises_through_green():
    # green the whole approach: hold the limit, cross at d/v
    sig = SignalTiming(cycle_length=60.0, green_start=0.0, green_duration=59.0)
    ctx = _ctx(t0=0.0)
    leg = plan_baseline_profile(ctx, sig)
    assert np.all(leg.profile.speeds == 15.0)
    assert leg.crossing_time == pytest.approx(20.0, abs=1e-9)
    assert leg.end_speed == 15.0
    assert leg.end_position >= 300.0


def test_baseline_stops_idles_and_departs_on_green():
    # red until t=30: the driver brakes to the bar, idles, and the leg
    # ends at the onset
    sig = SignalTiming(cycle_length=60.0, green_start=30.0, green_duration=30.0)
    ctx = _ctx(t0=0.0)
    leg = plan_baseline_profile(ctx, sig)
    assert leg.crossing_time == 30.0
    assert leg.end_speed == 0.0
    assert leg.end_position == 300.0
    assert np.any(leg.profile.speeds == 0.0)
    assert Mode.STOP in leg.profile.modes
    leg.profile.validate(15.0, A_MAX, A_MIN)


def test_baseline_accelerates_from_rest():
    sig = SignalTiming(cycle_length=60.0, green_start=0.0, green_duration=59.0)
    ctx = _ctx(t0=0.0, v=0.0)
    leg = plan_baseline_profile(ctx, sig)
    assert leg.profile.speeds[0] == 0.0
    assert leg.end_speed > 0.5
    leg.profile.validate(15.0, A_MAX, A_MIN)


def test_baseline_never_crosses_on_red():
    # whatever the phase, the bar is crossed during green (moving) or
    # at the onset after idling out the red
    rng = np.random.default_rng(31)
    for _ in range(60):
        vlim = float(rng.uniform(12.0, 18.0))
        v0 = float(rng.uniform(0.0, 1.0)) * vlim
        d = float(rng.uniform(200.0, 700.0))
        cycle = int(rng.integers(50, 100))
        green = int(rng.integers(20, cycle - 10))
        start = int(rng.integers(0, cycle - green + 1))
        sig = SignalTiming(float(cycle), float(start), float(green))
        ctx = _ctx(t0=float(rng.integers(0, 200)), v=v0, bar=d, vlim=vlim)
        leg = plan_baseline_profile(ctx, sig)
        assert sig.is_green(leg.crossing_time), (
            f"red crossing at t={leg.crossing_time} for cycle={cycle} "
            f"start={start} green={green} v0={v0:.2f} d={d:.1f}"
        )
        leg.profile.validate(vlim, A_MAX, A_MIN)
        # the rendered trace and the leg bookkeeping agree
        end = ctx.current_position + leg.profile.total_distance
        assert abs(end - leg.end_position) <= 1e-6
        # overshoot past the bar is bounded by one second of travel
        assert leg.end_position <= d + vlim * 1.0 + 1e-9


def test_planner_context_validation():
    with pytest.raises(ValueError):
        _ctx(v=-1.0)
    with pytest.raises(ValueError):
        _ctx(v=16.0)          # above the limit
    with pytest.raises(ValueError):
        _ctx(pos=300.0)       # bar not ahead
    with pytest.raises(ValueError):
        PlannerContext(0.0, 0.0, 5.0, 100.0, 10.0, None, a_max=0.0, a_min=-1.0)
    with pytest.raises(ValueError):
        PlannerContext(0.0, 0.0, 5.0, 100.0, 10.0, None, a_max=1.0, a_min=0.0)
    assert _ctx().distance == 300.0
