"""Speed-trajectory planning through signalized intersections.

Two planners share one kinematic vocabulary: half-cosine speed ramps
and constant-speed holds, sampled at 1 Hz.  The eco planner picks one
of four shapes (SlowDown, SpeedUp, Cruise, Stop) so the stop bar is
crossed inside the predicted green window; the baseline planner mimics
an uninformed driver that holds the speed limit, brakes for red, idles
at the bar, and launches on green.

The half-cosine ramp v(t) = v0 + (vf - v0) * (1 - cos(pi t / T)) / 2
integrates to exactly T * (v0 + vf) / 2, and its 1 Hz samples over an
integer duration reproduce that integral under the trapezoid rule, so
planned profiles close their route length to float precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .traffic import GreenWindow, SignalTiming


class Mode(Enum):
    SLOW_DOWN = "SlowDown"
    SPEED_UP = "SpeedUp"
    CRUISE = "Cruise"
    STOP = "Stop"


@dataclass
class SpeedProfile:
    """1 Hz speed samples starting at absolute time t0.

    ``modes`` carries one tag per sample naming the maneuver that
    produced it.
    """

    t0: float
    speeds: np.ndarray
    modes: list[Mode]
    dt: float = 1.0

    def __post_init__(self) -> None:
        self.speeds = np.asarray(self.speeds, dtype=float)
        if self.speeds.ndim != 1 or len(self.speeds) == 0:
            raise ValueError("profile needs at least one sample")
        if len(self.modes) != len(self.speeds):
            raise ValueError("one mode tag per sample")
        if self.dt <= 0:
            raise ValueError("dt must be positive")

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.speeds))

    def distance_trace(self) -> np.ndarray:
        """Cumulative trapezoid distance at each sample, meters."""
        steps = 0.5 * (self.speeds[:-1] + self.speeds[1:]) * self.dt
        return np.concatenate(([0.0], np.cumsum(steps)))

    @property
    def total_distance(self) -> float:
        return float(self.distance_trace()[-1])

    @property
    def duration(self) -> float:
        return (len(self.speeds) - 1) * self.dt

    def validate(
        self,
        speed_limit: float,
        a_max: float,
        a_min: float,
        route_length: float | None = None,
        tol_m: float = 0.5,
    ) -> None:
        """Raise ValueError on any kinematic invariant violation."""
        v = self.speeds
        if np.any(v < -1e-9):
            raise ValueError("negative speed sample")
        if np.any(v > speed_limit + 1e-6):
            raise ValueError("speed above limit")
        dv = np.diff(v) / self.dt
        if np.any(dv > a_max + 1e-6):
            raise ValueError("acceleration above comfort bound")
        if np.any(dv < a_min - 1e-6):
            raise ValueError("deceleration below comfort bound")
        if route_length is not None and abs(self.total_distance - route_length) > tol_m:
            raise ValueError(
                f"distance {self.total_distance:.3f} m does not close route {route_length:.3f} m"
            )


@dataclass(frozen=True)
class PlannerContext:
    """Inputs for planning one approach leg.

    ``t0`` is the absolute clock at the planning instant; the green
    window is expressed on the same clock.
    """

    t0: float
    current_position: float
    current_speed: float
    stopbar_position: float
    speed_limit: float
    green_window: GreenWindow | None
    a_max: float
    a_min: float

    def __post_init__(self) -> None:
        if self.current_speed < 0 or self.current_speed > self.speed_limit + 1e-9:
            raise ValueError("current speed must lie in [0, speed_limit]")
        if self.stopbar_position <= self.current_position:
            raise ValueError("stop bar must lie ahead of the vehicle")
        if self.speed_limit <= 0:
            raise ValueError("speed limit must be positive")
        if self.a_max <= 0 or self.a_min >= 0:
            raise ValueError("need a_max > 0 and a_min < 0")

    @property
    def distance(self) -> float:
        return self.stopbar_position - self.current_position


@dataclass
class LegPlan:
    """Planned profile for one leg plus the bookkeeping to chain legs."""

    profile: SpeedProfile
    mode: Mode
    crossing_time: float
    end_position: float
    end_speed: float


# ============================================================
# segment algebra
# ============================================================

def trig_segment(v0: float, vf: float, duration: float) -> np.ndarray:
    """Half-cosine ramp from v0 to vf, sampled at 1 Hz (duration+1 points).

    ``duration`` must be a positive whole number of seconds.
    """
    if v0 < 0 or vf < 0:
        raise ValueError("speeds must be non-negative")
    if duration < 1 or abs(duration - round(duration)) > 1e-9:
        raise ValueError("duration must be a positive integer second count")
    n = int(round(duration))
    t = np.arange(n + 1, dtype=float)
    v = v0 + (vf - v0) * 0.5 * (1.0 - np.cos(np.pi * t / n))
    v[0] = v0
    v[-1] = vf
    return v


def _ramp_time(dv: float, bound: float) -> int:
    """Shortest integer ramp whose peak rate pi*|dv|/(2T) honors the bound."""
    if bound <= 0:
        raise ValueError("rate bound must be positive")
    return max(1, math.ceil(math.pi * abs(dv) / (2.0 * bound) - 1e-12))


def _segment_distance(segments) -> float:
    d = 0.0
    for kind, a, b, n in segments:
        if kind == "ramp":
            d += n * (a + b) / 2.0
        else:
            d += n * a
    return d


def _segment_duration(segments) -> int:
    return sum(n for _, _, _, n in segments)


def _render(segments) -> np.ndarray:
    """Concatenate segment samples, sharing the joint sample exactly."""
    first = segments[0]
    v0 = first[1]
    out = [np.array([v0])]
    for kind, a, b, n in segments:
        if kind == "ramp":
            out.append(trig_segment(a, b, n)[1:])
        else:
            out.append(np.full(n, a))
    return np.concatenate(out)


def _comfort_ok(v_from: float, v_to: float, n: int, a_max: float, a_min: float) -> bool:
    rate = math.pi * abs(v_to - v_from) / (2.0 * n)
    bound = a_max if v_to >= v_from else -a_min
    return rate <= bound + 1e-9


def solve_pass_leg(
    v0: float,
    distance: float,
    horizon: int,
    v_lo: float,
    v_hi: float,
    a_max: float,
    a_min: float,
):
    """Ramp-then-cruise covering ``distance`` in exactly ``horizon`` seconds.

    Returns segments [ramp(v0->vc, T), hold(vc, horizon-T)] with the
    cruise speed solved from the exact distance identity, or None when
    no integer ramp time yields a cruise speed inside [v_lo, v_hi] at
    comfortable rates.
    """
    if horizon < 1:
        return None
    for t_ramp in range(1, horizon + 1):
        denom = horizon - t_ramp / 2.0
        vc = (distance - t_ramp * v0 / 2.0) / denom
        if vc <= 0:
            continue
        if vc < v_lo - 1e-9 or vc > v_hi + 1e-9:
            continue
        if not _comfort_ok(v0, vc, t_ramp, a_max, a_min):
            continue
        segments = [("ramp", v0, vc, t_ramp)]
        if horizon - t_ramp > 0:
            segments.append(("hold", vc, vc, horizon - t_ramp))
        return segments
    return None


def solve_stop_leg(
    v0: float,
    distance: float,
    v_hi: float,
    a_max: float,
    a_min: float,
):
    """Earliest comfortable stop exactly ``distance`` meters ahead.

    Returns (segments, arrival) where segments are ramp(v0->vc, Ta),
    hold(vc, n), ramp(vc->0, Td) and arrival = Ta + n + Td seconds.
    """
    if distance <= 0:
        raise ValueError("stop distance must be positive")
    t_dec0 = _ramp_time(max(v0, 1.0), -a_min)
    k = max(2, t_dec0 + 1)
    k_cap = int(2 * distance + 2 * t_dec0 + 60)
    while k <= k_cap:
        for t_adj in range(1, min(10, k - 1) + 1):
            for t_dec in range(max(1, t_dec0 - 2), t_dec0 + 8):
                n = k - t_adj - t_dec
                if n < 0:
                    continue
                denom = t_adj / 2.0 + n + t_dec / 2.0
                vc = (distance - t_adj * v0 / 2.0) / denom
                if vc <= 0 or vc > v_hi + 1e-9:
                    continue
                if not _comfort_ok(v0, vc, t_adj, a_max, a_min):
                    continue
                if not _comfort_ok(vc, 0.0, t_dec, a_max, a_min):
                    continue
                segments = [("ramp", v0, vc, t_adj)]
                if n > 0:
                    segments.append(("hold", vc, vc, n))
                segments.append(("ramp", vc, 0.0, t_dec))
                return segments, k
        k += 1
    raise ValueError("no comfortable stop plan found")


# ============================================================
# eco planner
# ============================================================

def _feasible_arrivals(ctx: PlannerContext, v_lo: float) -> list[tuple[int, list]]:
    """All integer arrival offsets inside the window with a valid pass plan."""
    w = ctx.green_window
    if w is None:
        return []
    k_lo = max(1, math.ceil(w.earliest_pass - ctx.t0 - 1e-9))
    k_hi = math.floor(w.latest_pass - ctx.t0 + 1e-9)
    found = []
    for k in range(k_lo, k_hi + 1):
        seg = solve_pass_leg(
            ctx.current_speed, ctx.distance, k, v_lo, ctx.speed_limit, ctx.a_max, ctx.a_min
        )
        if seg is not None:
            found.append((k, seg))
    return found


def select_mode(ctx: PlannerContext, *, floor_fraction: float = 0.7) -> Mode:
    """Choose the profile shape for this approach.

    Cruise when the current speed is legal for passing and its arrival
    already falls inside the window; otherwise SpeedUp or SlowDown when
    some comfortable ramp-and-cruise at a legal speed makes the window;
    Stop when nothing does.
    """
    mode, _, _ = _classify(ctx, floor_fraction)
    return mode


def _classify(ctx: PlannerContext, floor_fraction: float):
    v_lo = floor_fraction * ctx.speed_limit
    feasible = _feasible_arrivals(ctx, v_lo)
    if not feasible:
        return Mode.STOP, None, None
    w = ctx.green_window
    v0 = ctx.current_speed
    t_cur = ctx.t0 + ctx.distance / v0 if v0 > 0 else math.inf
    if w.contains(t_cur) and v0 >= v_lo - 1e-9:
        # keep the current speed: nearest feasible integer arrival,
        # ties toward the later one (lower cruise speed)
        want = ctx.distance / v0
        best = min(feasible, key=lambda kv: (abs(kv[0] - want), -kv[0]))
        return Mode.CRUISE, best[0], best[1]
    if t_cur > w.latest_pass or v0 < v_lo:
        return Mode.SPEED_UP, None, feasible
    return Mode.SLOW_DOWN, None, feasible


def plan_eco_profile(
    ctx: PlannerContext,
    *,
    signal: SignalTiming | None = None,
    floor_fraction: float = 0.7,
    window_fraction: float = 0.5,
) -> LegPlan:
    """Plan the leg up to the stop bar honoring the green window.

    Pass modes cross the bar at an integer-second target inside the
    window: Cruise keeps the arrival closest to the current-speed one,
    SlowDown/SpeedUp target the configured fraction of the feasible
    arrival list (midpoint by default).  Stop glides to a standstill at
    the bar and dwells; the profile ends at the departure instant (the
    next green onset, from ``signal`` when given, else the window
    opening), and the launch back to speed belongs to the next leg.
    """
    if not 0.0 <= window_fraction <= 1.0:
        raise ValueError("window_fraction must lie in [0, 1]")
    mode, k_sel, payload = _classify(ctx, floor_fraction)

    if mode is Mode.STOP:
        segments, arrival = solve_stop_leg(
            ctx.current_speed, ctx.distance, ctx.speed_limit, ctx.a_max, ctx.a_min
        )
        t_stop = ctx.t0 + arrival
        if signal is not None:
            depart = signal.next_green_time(t_stop)
        elif ctx.green_window is not None:
            depart = max(t_stop, ctx.green_window.earliest_pass)
        else:
            depart = t_stop
        dwell = max(0, math.ceil(depart - t_stop - 1e-9))
        speeds = _render(segments)
        if dwell > 0:
            speeds = np.concatenate([speeds, np.zeros(dwell)])
        profile = SpeedProfile(ctx.t0, speeds, [Mode.STOP] * len(speeds))
        return LegPlan(
            profile=profile,
            mode=Mode.STOP,
            crossing_time=ctx.t0 + arrival + dwell,
            end_position=ctx.stopbar_position,
            end_speed=0.0,
        )

    if mode is Mode.CRUISE:
        k, segments = k_sel, payload
    else:
        feasible = payload
        idx = round(window_fraction * (len(feasible) - 1))
        k, segments = feasible[idx]
    speeds = _render(segments)
    profile = SpeedProfile(ctx.t0, speeds, [mode] * len(speeds))
    return LegPlan(
        profile=profile,
        mode=mode,
        crossing_time=ctx.t0 + k,
        end_position=ctx.stopbar_position,
        end_speed=float(speeds[-1]),
    )


def plan_terminal_stop(ctx: PlannerContext) -> LegPlan:
    """Comfortable stop exactly at the route end (no signal involved)."""
    segments, arrival = solve_stop_leg(
        ctx.current_speed, ctx.distance, ctx.speed_limit, ctx.a_max, ctx.a_min
    )
    speeds = _render(segments)
    profile = SpeedProfile(ctx.t0, speeds, [Mode.SLOW_DOWN] * len(speeds))
    return LegPlan(
        profile=profile,
        mode=Mode.SLOW_DOWN,
        crossing_time=ctx.t0 + arrival,
        end_position=ctx.stopbar_position,
        end_speed=0.0,
    )


# ============================================================
# baseline planner
# ============================================================

def _min_stop_distance(v: float, a_min: float) -> float:
    return math.pi * v * v / (4.0 * -a_min)


def plan_baseline_profile(
    ctx: PlannerContext,
    signal: SignalTiming,
    *,
    max_steps: int = 3600,
) -> LegPlan:
    """Reactive limit-speed driver for one approach leg.

    Each second the driver holds or ramps toward the speed limit,
    engages an exact stop at the bar when the signal is red now or will
    be red at the projected arrival and the bar is within the
    comfortable stop envelope, and abandons the stop (resuming
    acceleration, speed trace continuous) once the condition clears.
    The leg ends when the bar is crossed at speed, or at the departure
    instant after idling out a red.
    """
    vlim = ctx.speed_limit
    bar = ctx.stopbar_position
    t = ctx.t0
    v = ctx.current_speed
    pos = ctx.current_position
    speeds = [v]
    tags: list[Mode] = []
    plan: list[float] = []   # queued future samples of the active ramp
    plan_mode: Mode | None = None
    crossing = None

    for _ in range(max_steps):
        at_bar = abs(pos - bar) < 1e-6
        if at_bar and v == 0.0:
            if signal.is_green(t):
                crossing = t
                break
            action, next_v = Mode.STOP, 0.0
            plan, plan_mode = [], None
        else:
            d_rem = bar - pos
            t_arr = t + d_rem / max(v, 0.5)
            red_now = not signal.is_green(t)
            red_later = not signal.is_green(t_arr)
            in_envelope = d_rem <= _min_stop_distance(v, ctx.a_min) + 1.5 * max(v, 1.0)
            braking = False
            if plan_mode is Mode.SLOW_DOWN and red_now and plan:
                # committed stop: keep braking while the light stays red
                action, next_v = Mode.SLOW_DOWN, plan.pop(0)
                braking = True
            elif in_envelope and (red_now or red_later) and d_rem > 0:
                if plan_mode is not Mode.SLOW_DOWN:
                    try:
                        segments, _ = solve_stop_leg(v, d_rem, vlim, ctx.a_max, ctx.a_min)
                    except ValueError:
                        segments = None   # too close to stop comfortably: carry on
                    if segments is not None:
                        plan = list(_render(segments)[1:])
                        plan_mode = Mode.SLOW_DOWN
                if plan_mode is Mode.SLOW_DOWN:
                    action, next_v = Mode.SLOW_DOWN, plan.pop(0)
                    braking = True
            if not braking:
                if plan_mode is Mode.SLOW_DOWN:
                    plan, plan_mode = [], None
                if v < vlim - 1e-9:
                    if plan_mode is not Mode.SPEED_UP or not plan:
                        n = _ramp_time(vlim - v, ctx.a_max)
                        plan = list(trig_segment(v, vlim, n)[1:])
                        plan_mode = Mode.SPEED_UP
                    action, next_v = Mode.SPEED_UP, plan.pop(0)
                    if not plan:
                        plan_mode = None
                else:
                    action, next_v = Mode.CRUISE, vlim
                    plan, plan_mode = [], None

        step_d = 0.5 * (v + next_v)
        prev_pos = pos
        pos += step_d
        t += 1.0
        v = next_v
        speeds.append(v)
        tags.append(action)
        if action is Mode.SLOW_DOWN and not plan and plan_mode is Mode.SLOW_DOWN:
            pos = bar          # stop plan lands exactly at the bar
            plan_mode = None
        if pos >= bar - 1e-9 and v > 0.5:
            frac = (bar - prev_pos) / step_d if step_d > 0 else 0.0
            crossing = t - 1.0 + min(max(frac, 0.0), 1.0)
            break
    else:
        raise RuntimeError("baseline leg did not terminate")

    if crossing is None:
        raise RuntimeError("baseline leg did not terminate")
    tags.insert(0, tags[0] if tags else Mode.CRUISE)
    profile = SpeedProfile(ctx.t0, np.array(speeds), tags[: len(speeds)])
    return LegPlan(
        profile=profile,
        mode=tags[-1],
        crossing_time=float(crossing),
        end_position=float(pos),
        end_speed=float(v),
    )
