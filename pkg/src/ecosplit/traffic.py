"""Signal timing, kinematic-wave arithmetic, and point-queue dynamics.

The corridor is described by fixed-time signals and aggregate traffic
states.  Queue interfaces between states move at the Rankine-Hugoniot
wave speed; the per-intersection queue itself is tracked as a point
queue in fractional vehicles so that conservation is exact.  The green
window handed to the speed planner is the slice of a green phase left
over after the standing queue has discharged at saturation flow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EqualDensity, NoWindowInHorizon

DEFAULT_SATURATION_FLOW = 1800.0   # veh/h/lane
DEFAULT_JAM_DENSITY = 150.0        # veh/km/lane


@dataclass(frozen=True)
class SignalTiming:
    """One green phase per fixed cycle, all values in seconds.

    ``green_start`` is the phase offset of the green onset from the
    cycle boundary; ``reference_time`` anchors cycle 0 on the absolute
    clock.
    """

    cycle_length: float
    green_start: float
    green_duration: float
    reference_time: float = 0.0

    def __post_init__(self) -> None:
        if self.cycle_length <= 0:
            raise ValueError("cycle_length must be positive")
        if not 0 < self.green_duration < self.cycle_length:
            raise ValueError("green_duration must lie strictly inside the cycle")
        if self.green_start < 0 or self.green_start + self.green_duration > self.cycle_length:
            raise ValueError("green phase must fit inside one cycle")

    def cycle_index(self, t: float) -> int:
        return math.floor((t - self.reference_time) / self.cycle_length)

    def phase_offset(self, t: float) -> float:
        return (t - self.reference_time) % self.cycle_length

    def is_green(self, t: float) -> bool:
        off = self.phase_offset(t)
        return self.green_start <= off < self.green_start + self.green_duration

    def green_interval(self, cycle: int) -> tuple[float, float]:
        """Absolute [onset, end) of the green phase of the given cycle."""
        onset = self.reference_time + cycle * self.cycle_length + self.green_start
        return onset, onset + self.green_duration

    def green_onset_at(self, t: float) -> float:
        """Onset of the green phase containing t.  Requires is_green(t)."""
        if not self.is_green(t):
            raise ValueError("t is not inside a green phase")
        return t - (self.phase_offset(t) - self.green_start)

    def next_green_time(self, t: float) -> float:
        """Earliest instant >= t at which the signal shows green."""
        if self.is_green(t):
            return t
        onset, _ = self.green_interval(self.cycle_index(t))
        if onset >= t:
            return onset
        onset, _ = self.green_interval(self.cycle_index(t) + 1)
        return onset


@dataclass(frozen=True)
class TrafficState:
    """Aggregate state of one road section: flow in veh/h, density in veh/km."""

    flow: float
    density: float

    def __post_init__(self) -> None:
        if self.flow < 0 or self.density < 0:
            raise ValueError("flow and density must be non-negative")


@dataclass(frozen=True)
class QueueEstimate:
    """Standing queue at a stop bar, in fractional vehicles.

    ``queue_tail_position`` is meters upstream of the bar at jam
    spacing; ``formed_at`` is the absolute time the current nonzero
    episode began (the sample time for an empty queue).
    """

    queue_length: float
    queue_tail_position: float
    formed_at: float

    def __post_init__(self) -> None:
        if self.queue_length < 0 or self.queue_tail_position < 0:
            raise ValueError("queue length and tail position must be non-negative")
        if (self.queue_length == 0) != (self.queue_tail_position == 0):
            raise ValueError("tail position must be zero exactly when the queue is empty")


@dataclass(frozen=True)
class GreenWindow:
    """Absolute time span in which the stop bar can be crossed freely."""

    earliest_pass: float
    latest_pass: float

    def __post_init__(self) -> None:
        if not self.earliest_pass < self.latest_pass:
            raise ValueError("window must have positive width")

    @property
    def width(self) -> float:
        return self.latest_pass - self.earliest_pass

    def contains(self, t: float) -> bool:
        return self.earliest_pass <= t <= self.latest_pass


@dataclass(frozen=True)
class Intersection:
    """One signalized approach on the corridor."""

    position_m: float
    signal: SignalTiming
    lanes: int = 1
    saturation_flow_vph: float = DEFAULT_SATURATION_FLOW   # per lane
    arrival_rate_vph: float = 0.0                          # total approach demand
    jam_density_vpkm: float = DEFAULT_JAM_DENSITY          # per lane

    def __post_init__(self) -> None:
        if self.position_m < 0:
            raise ValueError("position must be non-negative")
        if self.lanes < 1:
            raise ValueError("at least one lane")
        if self.saturation_flow_vph <= 0 or self.jam_density_vpkm <= 0:
            raise ValueError("saturation flow and jam density must be positive")
        if self.arrival_rate_vph < 0:
            raise ValueError("arrival rate must be non-negative")

    @property
    def lane_arrival_rate_vph(self) -> float:
        return self.arrival_rate_vph / self.lanes


@dataclass(frozen=True)
class Corridor:
    """Ordered signalized intersections plus the overall route extent."""

    intersections: tuple[Intersection, ...]
    length_m: float
    speed_limit_mps: float

    def __post_init__(self) -> None:
        if self.length_m < 0:
            raise ValueError("corridor length must be non-negative")
        if self.speed_limit_mps <= 0 and self.length_m > 0:
            raise ValueError("speed limit must be positive")
        pos = [x.position_m for x in self.intersections]
        if pos != sorted(pos):
            raise ValueError("intersections must be ordered by position")
        if pos and pos[-1] > self.length_m:
            raise ValueError("intersections must lie within the corridor")


def shockwave_speed(upstream: TrafficState, downstream: TrafficState) -> float:
    """Speed of the interface between two traffic states, km/h (signed).

    Negative values propagate against the travel direction, e.g. the
    back of a stopped queue growing upstream.
    """
    if upstream.density == downstream.density:
        raise EqualDensity("wave speed undefined for equal densities")
    return (downstream.flow - upstream.flow) / (downstream.density - upstream.density)


def evolve_queue(
    signal: SignalTiming,
    arrivals_vph,
    saturation_flow: float,
    t0: float,
    horizon: int,
    *,
    initial_queue: float = 0.0,
    jam_density: float = DEFAULT_JAM_DENSITY,
    startup_lost_time: float = 0.0,
) -> list[QueueEstimate]:
    """Point-queue trace at 1 Hz over [t0, t0 + horizon].

    ``arrivals_vph`` gives the arrival rate (veh/h) for each one-second
    step; discharge runs at ``saturation_flow`` whenever the signal is
    effectively green (green minus the start-up lost time).  Departures
    are capped by what is present, so cumulative arrivals minus
    cumulative departures reproduces the queue exactly.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least one step")
    if saturation_flow <= 0:
        raise ValueError("saturation flow must be positive")
    if initial_queue < 0:
        raise ValueError("initial queue must be non-negative")
    arrivals = np.asarray(arrivals_vph, dtype=float)
    if arrivals.ndim != 1 or len(arrivals) < horizon:
        raise ValueError("arrival trace must cover the horizon")
    if np.any(arrivals < 0):
        raise ValueError("arrival rates must be non-negative")

    spacing = 1000.0 / jam_density
    q = float(initial_queue)
    formed = t0
    out = [QueueEstimate(q, q * spacing, formed)]
    for k in range(horizon):
        t = t0 + k
        if signal.is_green(t) and (t - signal.green_onset_at(t)) >= startup_lost_time:
            cap = saturation_flow / 3600.0
        else:
            cap = 0.0
        a = arrivals[k] / 3600.0
        d = min(q + a, cap)
        was_empty = q == 0
        q = q + a - d
        if was_empty and q > 0:
            formed = t
        elif q == 0:
            formed = t + 1
        out.append(QueueEstimate(q, q * spacing, formed))
    return out


def predict_green_window(
    signal: SignalTiming,
    queue_at_arrival: QueueEstimate,
    saturation_flow: float,
    approach_cycle_index: int,
    *,
    startup_lost_time: float = 0.0,
    max_cycles: int = 10,
) -> GreenWindow:
    """Passable window after the standing queue discharges at saturation.

    Starting from the indexed cycle, each green phase first serves the
    residual queue at one vehicle per 3600/saturation_flow seconds; the
    window opens when the queue is gone and closes at green end.  If a
    phase is fully consumed the residue rolls to the next cycle, up to
    ``max_cycles`` before giving up.
    """
    if saturation_flow <= 0:
        raise ValueError("saturation flow must be positive")
    if max_cycles < 1:
        raise ValueError("max_cycles must be at least 1")
    headway = 3600.0 / saturation_flow
    remaining = queue_at_arrival.queue_length
    for i in range(approach_cycle_index, approach_cycle_index + max_cycles):
        onset, end = signal.green_interval(i)
        open_t = onset + startup_lost_time
        if open_t >= end:
            continue
        earliest = open_t + remaining * headway
        if earliest < end:
            return GreenWindow(earliest, end)
        remaining -= (end - open_t) / headway
    raise NoWindowInHorizon(
        f"queue of {queue_at_arrival.queue_length:.2f} veh not served within {max_cycles} cycles"
    )
