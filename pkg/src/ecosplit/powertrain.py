"""Power-split HEV component models: road load, battery SOC, engine, rule base.

The battery state of charge moves by a quadratic polynomial in the
motor/generator electrical power, with separate coefficient sets for
A/C on and off, over a fixed 1 s step.  The engine runs on an optimal
operating line (power to speed lookup) with fuel drawn from a bilinear
map.  A threshold rule base provides the non-optimized power split the
dynamic program is compared against.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleDemand, OutOfEnvelope
from .planner import SpeedProfile
from .tables import Grid2D, bilinear, monotone_interp

GRAVITY = 9.81          # m/s^2
SOC_STEP_SECONDS = 1.0  # the SOC polynomial is calibrated per one-second step


@dataclass(frozen=True)
class VehicleParams:
    """Chassis and driveline constants for the road-load calculation."""

    mass_kg: float = 1530.0
    drag_area_m2: float = 0.58          # Cd * A
    rolling_coeff: float = 0.009
    air_density_kg_m3: float = 1.2
    driveline_efficiency: float = 0.92
    regen_efficiency: float = 0.60
    regen_power_limit_w: float = 25000.0   # magnitude of the charge floor

    def __post_init__(self) -> None:
        for name in (
            "mass_kg",
            "drag_area_m2",
            "rolling_coeff",
            "air_density_kg_m3",
            "regen_power_limit_w",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.driveline_efficiency <= 1:
            raise ValueError("driveline_efficiency must lie in (0, 1]")
        if not 0 < self.regen_efficiency <= 1:
            raise ValueError("regen_efficiency must lie in (0, 1]")


@dataclass(frozen=True)
class SocModelParams:
    """Quadratic SOC-increment coefficients (per second).

    ``xi[0:6]`` belong to the A/C-on branch (P, P^2, P*Paux, Paux,
    Paux^2, constant); ``xi[6:9]`` to the A/C-off branch (P, P^2,
    constant), with P the M/G electrical power in watts.
    """

    xi: tuple[float, ...]
    soc_min: float = 0.40
    soc_max: float = 0.80

    def __post_init__(self) -> None:
        if len(self.xi) != 9:
            raise ValueError("need exactly 9 coefficients")
        if not 0 <= self.soc_min < self.soc_max <= 1:
            raise ValueError("SOC bounds must satisfy 0 <= min < max <= 1")


@dataclass(frozen=True)
class PowertrainState:
    soc: float
    engine_on: bool = False


@dataclass(frozen=True)
class BatteryLimits:
    p_min_w: float = -25000.0
    p_max_w: float = 25000.0
    capacity_kwh: float = 1.3

    def __post_init__(self) -> None:
        if self.p_min_w >= 0 or self.p_max_w <= 0:
            raise ValueError("battery envelope must span zero")
        if self.capacity_kwh <= 0:
            raise ValueError("capacity must be positive")


@dataclass(frozen=True)
class OperatingLine:
    """Monotone engine power -> speed lookup (the best-BSFC line)."""

    power_w: np.ndarray
    omega_rad_s: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "power_w", np.asarray(self.power_w, dtype=float))
        object.__setattr__(self, "omega_rad_s", np.asarray(self.omega_rad_s, dtype=float))
        if len(self.power_w) != len(self.omega_rad_s) or len(self.power_w) < 2:
            raise ValueError("need matching knot arrays with at least two knots")
        if np.any(np.diff(self.power_w) <= 0) or np.any(np.diff(self.omega_rad_s) < 0):
            raise ValueError("knots must be monotone in power and non-decreasing in speed")

    @property
    def p_max(self) -> float:
        return float(self.power_w[-1])


@dataclass(frozen=True)
class RuleBasedConfig:
    """Thresholds for the baseline power-split rule."""

    engine_on_power_w: float = 9000.0
    soc_low: float = 0.52
    soc_target: float = 0.54
    recharge_gain_w_per_soc: float = 200000.0
    recharge_max_w: float = 8000.0
    min_on_power_w: float = 8000.0

    def __post_init__(self) -> None:
        if self.engine_on_power_w < 0:
            raise ValueError("engine-on threshold must be non-negative")
        if not 0 < self.soc_low < self.soc_target < 1:
            raise ValueError("need 0 < soc_low < soc_target < 1")
        if self.recharge_gain_w_per_soc < 0 or self.recharge_max_w < 0:
            raise ValueError("recharge terms must be non-negative")
        if self.min_on_power_w < 0:
            raise ValueError("minimum on-power must be non-negative")


@dataclass(frozen=True)
class PowertrainConfig:
    vehicle: VehicleParams
    soc_model: SocModelParams
    battery: BatteryLimits
    operating_line: OperatingLine
    fuel_map: Grid2D          # fuel g/s over (omega rad/s, engine power W)
    rule_based: RuleBasedConfig = field(default_factory=RuleBasedConfig)

    @property
    def p_eng_max(self) -> float:
        return self.operating_line.p_max


@dataclass(frozen=True)
class ControlDecision:
    """One second of power split: e_mode 1 = engine off, 2 = engine on."""

    e_mode: int
    p_bat_w: float
    p_mg_w: float
    p_eng_w: float

    def __post_init__(self) -> None:
        if self.e_mode not in (1, 2):
            raise ValueError("e_mode must be 1 or 2")
        if self.e_mode == 1 and self.p_eng_w != 0.0:
            raise ValueError("engine-off decision cannot carry engine power")
        if self.e_mode == 2 and self.p_eng_w <= 0.0:
            raise ValueError("engine-on decision needs strictly positive engine power")


@dataclass(frozen=True)
class EngineOp:
    omega_rad_s: float
    p_eng_w: float
    fuel_g_s: float


ENGINE_OFF_OP = EngineOp(0.0, 0.0, 0.0)


def traction_power(profile: SpeedProfile, params: VehicleParams) -> np.ndarray:
    """Electrical-equivalent traction demand per sample, watts.

    Wheel power is (m*a + m*g*Cr + 0.5*rho*CdA*v^2) * v with
    forward-difference acceleration (zero on the last sample).
    Positive power is inflated by the driveline efficiency; negative
    power is scaled by the regen efficiency and floored at the battery
    charge limit.
    """
    v = profile.speeds
    a = np.zeros_like(v)
    if len(v) > 1:
        a[:-1] = np.diff(v) / profile.dt
    force = (
        params.mass_kg * a
        + params.mass_kg * GRAVITY * params.rolling_coeff
        + 0.5 * params.air_density_kg_m3 * params.drag_area_m2 * v * v
    )
    wheel = force * v
    power = np.where(
        wheel >= 0,
        wheel / params.driveline_efficiency,
        np.maximum(wheel * params.regen_efficiency, -params.regen_power_limit_w),
    )
    return power


def soc_increment(p_mg_w: float, p_aux_w: float, ac_on: bool, params: SocModelParams) -> float:
    """Unclamped SOC change over one second for the given electrical loads."""
    x = params.xi
    p = p_mg_w
    if ac_on:
        return (
            x[0] * p
            + x[1] * p * p
            + x[2] * p * p_aux_w
            + x[3] * p_aux_w
            + x[4] * p_aux_w * p_aux_w
            + x[5]
        )
    return x[6] * p + x[7] * p * p + x[8]


def soc_step(
    state: PowertrainState,
    p_mg_w: float,
    p_aux_w: float,
    ac_on: bool,
    params: SocModelParams,
    engine_on: bool = False,
) -> tuple[PowertrainState, bool]:
    """Advance SOC one second; clamp to bounds and flag saturation.

    ``engine_on`` records the decision just applied, so the rule base's
    hysteresis sees it next second.
    """
    raw = state.soc + soc_increment(p_mg_w, p_aux_w, ac_on, params)
    clamped = min(max(raw, params.soc_min), params.soc_max)
    return PowertrainState(clamped, engine_on), clamped != raw


def optimal_operating_line(p_eng_w: float, line: OperatingLine) -> float:
    """Engine speed on the operating line for a positive engine power."""
    if p_eng_w <= 0:
        raise ValueError("operating line is defined for positive engine power")
    if p_eng_w > line.p_max + 1e-6:
        raise OutOfEnvelope(f"engine power {p_eng_w:.0f} W above {line.p_max:.0f} W")
    return float(monotone_interp(line.power_w, line.omega_rad_s, p_eng_w, name="operating line"))


def fuel_rate(omega_rad_s: float, p_eng_w: float, fuel_map: Grid2D) -> float:
    """Fuel flow in g/s from the bilinear map; engine off burns nothing."""
    if p_eng_w == 0.0:
        if omega_rad_s != 0.0:
            raise ValueError("zero engine power requires zero engine speed")
        return 0.0
    if p_eng_w < 0:
        raise ValueError("engine power cannot be negative")
    return float(bilinear(fuel_map, omega_rad_s, p_eng_w))


def engine_op_for(p_eng_w: float, config: PowertrainConfig) -> EngineOp:
    """Operating-line speed and map fuel for a positive engine power."""
    omega = optimal_operating_line(p_eng_w, config.operating_line)
    return EngineOp(omega, p_eng_w, fuel_rate(omega, p_eng_w, config.fuel_map))


def rule_based_split(
    p_trac_w: float,
    p_aux_w: float,
    v_mps: float,
    state: PowertrainState,
    config: PowertrainConfig,
) -> tuple[ControlDecision, EngineOp]:
    """Threshold power split: electric below the power threshold, engine above.

    The engine always stops at standstill and always runs above the
    power threshold.  At low demand SOC hysteresis decides: the engine
    fires when SOC falls below ``soc_low`` and then keeps running until
    SOC recovers to ``soc_target``, so recharge happens in a few long
    runs instead of second-by-second chatter.  When on, the engine
    covers traction plus auxiliaries plus a proportional recharge bias
    whenever SOC sits below ``soc_target``, never below its minimum
    useful power.  Battery power always equals M/G power plus the
    auxiliary load.
    """
    rb = config.rule_based
    bat = config.battery
    soc = state.soc

    engine_off = v_mps == 0.0 or (
        p_trac_w <= rb.engine_on_power_w
        and (soc >= rb.soc_target or (soc >= rb.soc_low and not state.engine_on))
    )
    if not engine_off:
        bias = 0.0
        if soc < rb.soc_target:
            bias = min(rb.recharge_gain_w_per_soc * (rb.soc_target - soc), rb.recharge_max_w)
        p_eng = max(p_trac_w + p_aux_w + bias, rb.min_on_power_w)
        p_eng = min(p_eng, config.p_eng_max, p_trac_w + p_aux_w - bat.p_min_w)
        if p_eng <= 0.0:
            engine_off = True     # braking hard: nothing useful for the engine to do
    if engine_off:
        p_mg = p_trac_w
        p_bat = p_mg + p_aux_w
        if p_bat < bat.p_min_w:
            p_bat = bat.p_min_w          # friction brakes absorb the excess
            p_mg = p_bat - p_aux_w
        if p_bat > bat.p_max_w + 1e-9:
            raise InfeasibleDemand("electric-only demand above battery limit")
        return ControlDecision(1, p_bat, p_mg, 0.0), ENGINE_OFF_OP

    p_mg = p_trac_w - p_eng
    p_bat = p_mg + p_aux_w
    if p_bat > bat.p_max_w + 1e-9:
        raise InfeasibleDemand("demand exceeds engine plus battery limits")
    decision = ControlDecision(2, p_bat, p_mg, p_eng)
    return decision, engine_op_for(p_eng, config)
