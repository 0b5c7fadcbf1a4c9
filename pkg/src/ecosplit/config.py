"""Scenario configuration: defaults, map builders, YAML round-trip, digests.

A scenario bundles everything one simulation batch needs: the signal
corridor, vehicle and battery constants, the SOC polynomial, rule-base
thresholds, map-shaping parameters, thermal constants, catalyst
light-off curves, and batch settings.  YAML files mirror the dataclass
fields one-to-one under a ``schema_version`` guard; the engine maps are
rebuilt from their shaping parameters rather than stored point by
point, so a config digest covers them through those parameters.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError
from .powertrain import (
    BatteryLimits,
    OperatingLine,
    PowertrainConfig,
    RuleBasedConfig,
    SocModelParams,
    VehicleParams,
)
from .tables import Grid2D
from .thermal import (
    EfficiencyCurve,
    EmissionMaps,
    ReactionEnthalpies,
    SpeciesCurves,
    ThermalParams,
)
from .traffic import Corridor, Intersection, SignalTiming

SCHEMA_VERSION = 1

DEFAULT_XI = (
    -2.2e-7,   # P
    -1.0e-12,  # P^2
    -2.0e-12,  # P * Paux
    -2.3e-7,   # Paux
    -1.0e-12,  # Paux^2
    -2.0e-6,   # constant (A/C on)
    -2.2e-7,   # P (A/C off)
    -1.0e-12,  # P^2 (A/C off)
    -1.0e-6,   # constant (A/C off)
)


@dataclass(frozen=True)
class MapParams:
    """Shape parameters for the engine fuel and emission maps.

    Fuel follows a Willans line, (p / efficiency + friction * omega) /
    LHV, sampled on a rectangular (speed, power) grid.  Engine-out
    emissions are emission indices applied to that fuel rate: CO flat,
    NOx rising with load, HC boosted at low load.
    """

    willans_efficiency: float = 0.38
    friction_w_per_rad_s: float = 60.0
    fuel_lhv_j_g: float = 43000.0
    omega_min_rad_s: float = 80.0
    omega_max_rad_s: float = 400.0
    p_max_w: float = 72000.0
    grid_points: int = 12
    co_ei: float = 0.030
    nox_ei_base: float = 0.006
    nox_ei_span: float = 0.035
    nox_ei_knee_w: float = 36000.0
    nox_ei_exponent: float = 1.5
    hc_ei_base: float = 0.006
    hc_low_load_boost: float = 1.0
    hc_low_load_scale_w: float = 5000.0
    hc_start_g: float = 0.010
    ool_power_w: tuple[float, ...] = (
        0.0, 4000.0, 8000.0, 16000.0, 24000.0, 32000.0,
        40000.0, 48000.0, 56000.0, 64000.0, 72000.0,
    )
    ool_omega_rad_s: tuple[float, ...] = (
        90.0, 105.0, 120.0, 150.0, 175.0, 200.0,
        230.0, 260.0, 295.0, 335.0, 380.0,
    )

    def __post_init__(self) -> None:
        if not 0 < self.willans_efficiency < 1:
            raise ValueError("willans_efficiency must lie in (0, 1)")
        if self.grid_points < 2:
            raise ValueError("need at least a 2x2 map grid")
        if self.omega_min_rad_s >= self.omega_max_rad_s:
            raise ValueError("need omega_min < omega_max")
        if not 0 <= self.nox_ei_knee_w < self.p_max_w:
            raise ValueError("NOx knee must lie inside the map power range")
        if self.hc_start_g < 0:
            raise ValueError("hc_start_g cannot be negative")
        if self.ool_power_w[-1] > self.p_max_w + 1e-9:
            raise ValueError("operating line must stay inside the map power range")


@dataclass(frozen=True)
class SimulationSettings:
    """Batch knobs: fleet draw, initial conditions, optimizer grids."""

    seed: int = 7
    n_vehicles: int = 50
    v0_min_kmh: float = 48.0
    v0_max_kmh: float = 58.0
    v0_kmh: float = 53.0
    planner: str = "eco"
    controller: str = "dp"
    soc0: float = 0.53
    t_amb_c: float = 30.0
    t_cl0_c: float = 70.0
    t_cat0_c: float = 50.0
    p_aux_w: float = 1700.0
    ac_on: bool = True
    a_max_mps2: float = 2.0
    a_min_mps2: float = -3.0
    queue_warmup_s: float = 150.0
    soc_grid_step: float = 0.005
    p_bat_grid_step_w: float = 500.0
    terminal_weight_g: float = 50000.0
    charge_sustain_band: float = 0.05

    def __post_init__(self) -> None:
        if self.n_vehicles < 1:
            raise ValueError("need at least one vehicle")
        if not 0 < self.v0_min_kmh <= self.v0_max_kmh:
            raise ValueError("need 0 < v0_min <= v0_max")
        if self.v0_kmh < 0:
            raise ValueError("v0 must be non-negative")
        if self.planner not in ("baseline", "eco"):
            raise ValueError("planner must be 'baseline' or 'eco'")
        if self.controller not in ("rule", "dp"):
            raise ValueError("controller must be 'rule' or 'dp'")
        if self.a_max_mps2 <= 0 or self.a_min_mps2 >= 0:
            raise ValueError("need a_max > 0 and a_min < 0")
        if self.soc_grid_step <= 0 or self.p_bat_grid_step_w <= 0:
            raise ValueError("optimizer grid steps must be positive")


@dataclass
class Scenario:
    corridor: Corridor
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    soc_model: SocModelParams = field(
        default_factory=lambda: SocModelParams(xi=DEFAULT_XI)
    )
    battery: BatteryLimits = field(default_factory=BatteryLimits)
    rule_based: RuleBasedConfig = field(default_factory=RuleBasedConfig)
    maps: MapParams = field(default_factory=MapParams)
    thermal: ThermalParams = field(default_factory=ThermalParams)
    curves: SpeciesCurves = field(default_factory=lambda: default_light_off_curves())
    enthalpies: ReactionEnthalpies = field(default_factory=ReactionEnthalpies)
    sim: SimulationSettings = field(default_factory=SimulationSettings)

    def powertrain(self) -> PowertrainConfig:
        return PowertrainConfig(
            vehicle=self.vehicle,
            soc_model=self.soc_model,
            battery=self.battery,
            operating_line=build_operating_line(self.maps),
            fuel_map=build_fuel_map(self.maps),
            rule_based=self.rule_based,
        )

    def emission_maps(self) -> EmissionMaps:
        return build_emission_maps(self.maps)


def build_operating_line(mp: MapParams) -> OperatingLine:
    return OperatingLine(np.array(mp.ool_power_w), np.array(mp.ool_omega_rad_s))


def _map_axes(mp: MapParams) -> tuple[np.ndarray, np.ndarray]:
    omega = np.linspace(mp.omega_min_rad_s, mp.omega_max_rad_s, mp.grid_points)
    power = np.linspace(0.0, mp.p_max_w, mp.grid_points)
    return omega, power


def _willans_fuel(omega: np.ndarray, power: np.ndarray, mp: MapParams) -> np.ndarray:
    w, p = np.meshgrid(omega, power, indexing="ij")
    return (p / mp.willans_efficiency + mp.friction_w_per_rad_s * w) / mp.fuel_lhv_j_g


def build_fuel_map(mp: MapParams) -> Grid2D:
    omega, power = _map_axes(mp)
    return Grid2D(omega, power, _willans_fuel(omega, power, mp))


def build_emission_maps(mp: MapParams) -> EmissionMaps:
    omega, power = _map_axes(mp)
    fuel = _willans_fuel(omega, power, mp)
    _, p = np.meshgrid(omega, power, indexing="ij")
    co = mp.co_ei * fuel
    # NOx stays near-stoichiometric flat until the knee, then climbs
    # with load; HC is worst at light load
    over = np.clip((p - mp.nox_ei_knee_w) / (mp.p_max_w - mp.nox_ei_knee_w), 0.0, 1.0)
    nox = (mp.nox_ei_base + mp.nox_ei_span * over ** mp.nox_ei_exponent) * fuel
    hc = mp.hc_ei_base * (1.0 + mp.hc_low_load_boost * np.exp(-p / mp.hc_low_load_scale_w)) * fuel
    return EmissionMaps(
        hc=Grid2D(omega, power, hc),
        co=Grid2D(omega, power, co),
        nox=Grid2D(omega, power, nox),
    )


def default_light_off_curves() -> SpeciesCurves:
    return SpeciesCurves(
        hc=EfficiencyCurve(t50_c=250.0, steepness_per_c=0.10),
        co=EfficiencyCurve(t50_c=200.0, steepness_per_c=0.05),
        nox=EfficiencyCurve(t50_c=200.0, steepness_per_c=0.05),
    )


def default_corridor() -> Corridor:
    # six signals over 3.54 km; onset offsets chosen so a fixed-speed
    # run cannot ride a single green wave.  Offsets past the last slot
    # of the cycle are carried by reference_time instead of green_start.
    rows = [
        (420.0, 12.0, 420.0),
        (1000.0, 45.0, 380.0),
        (1580.0, 20.0, 400.0),
        (2160.0, 60.0, 450.0),
        (2750.0, 35.0, 380.0),
        (3340.0, 5.0, 400.0),
    ]
    cycle, green = 75.0, 33.0
    intersections = []
    for pos, onset, rate in rows:
        start, ref = (onset, 0.0) if onset + green <= cycle else (0.0, onset)
        intersections.append(
            Intersection(
                position_m=pos,
                signal=SignalTiming(
                    cycle_length=cycle,
                    green_start=start,
                    green_duration=green,
                    reference_time=ref,
                ),
                lanes=1,
                saturation_flow_vph=1800.0,
                arrival_rate_vph=rate,
                jam_density_vpkm=150.0,
            )
        )
    return Corridor(
        intersections=intersections, length_m=3540.0, speed_limit_mps=16.7
    )


def default_scenario() -> Scenario:
    return Scenario(corridor=default_corridor())


# ---------------------------------------------------------------------------
# serialization

def scenario_to_dict(s: Scenario) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "corridor": {
            "length_m": s.corridor.length_m,
            "speed_limit_mps": s.corridor.speed_limit_mps,
            "intersections": [
                {
                    "position_m": i.position_m,
                    "signal": asdict(i.signal),
                    "lanes": i.lanes,
                    "saturation_flow_vph": i.saturation_flow_vph,
                    "arrival_rate_vph": i.arrival_rate_vph,
                    "jam_density_vpkm": i.jam_density_vpkm,
                }
                for i in s.corridor.intersections
            ],
        },
        "vehicle": asdict(s.vehicle),
        "soc_model": {
            "xi": list(s.soc_model.xi),
            "soc_min": s.soc_model.soc_min,
            "soc_max": s.soc_model.soc_max,
        },
        "battery": asdict(s.battery),
        "rule_based": asdict(s.rule_based),
        "maps": {
            **{
                k: v
                for k, v in asdict(s.maps).items()
                if k not in ("ool_power_w", "ool_omega_rad_s")
            },
            "ool_power_w": list(s.maps.ool_power_w),
            "ool_omega_rad_s": list(s.maps.ool_omega_rad_s),
        },
        "thermal": asdict(s.thermal),
        "light_off": {
            "hc": asdict(s.curves.hc),
            "co": asdict(s.curves.co),
            "nox": asdict(s.curves.nox),
        },
        "reaction_heat": asdict(s.enthalpies),
        "simulation": asdict(s.sim),
    }


def _build(cls, mapping, where: str):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{where}: expected a mapping")
    try:
        return cls(**mapping)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def scenario_from_dict(d: dict) -> Scenario:
    if not isinstance(d, dict):
        raise ConfigError("scenario document must be a mapping")
    version = d.get("schema_version")
    if version is None:
        raise ConfigError("missing schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})"
        )
    known = {
        "schema_version", "corridor", "vehicle", "soc_model", "battery",
        "rule_based", "maps", "thermal", "light_off", "reaction_heat",
        "simulation",
    }
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    cd = d.get("corridor")
    if not isinstance(cd, dict) or "intersections" not in cd:
        raise ConfigError("corridor: need a mapping with an intersections list")
    intersections = []
    for idx, row in enumerate(cd["intersections"]):
        if not isinstance(row, dict) or "signal" not in row:
            raise ConfigError(f"corridor.intersections[{idx}]: need a signal mapping")
        signal = _build(SignalTiming, row["signal"], f"corridor.intersections[{idx}].signal")
        rest = {k: v for k, v in row.items() if k != "signal"}
        intersections.append(
            _build(
                lambda **kw: Intersection(signal=signal, **kw),
                rest,
                f"corridor.intersections[{idx}]",
            )
        )
    corridor = _build(
        lambda **kw: Corridor(intersections=intersections, **kw),
        {k: v for k, v in cd.items() if k != "intersections"},
        "corridor",
    )
    soc_raw = d.get("soc_model", {})
    if isinstance(soc_raw, dict) and "xi" in soc_raw:
        soc_raw = {**soc_raw, "xi": tuple(soc_raw["xi"])}
    maps_raw = d.get("maps", {})
    if isinstance(maps_raw, dict):
        maps_raw = {
            **maps_raw,
            **{
                k: tuple(maps_raw[k])
                for k in ("ool_power_w", "ool_omega_rad_s")
                if k in maps_raw
            },
        }
    lo = d.get("light_off", {})
    if not isinstance(lo, dict):
        raise ConfigError("light_off: expected a mapping")
    curves = SpeciesCurves(
        hc=_build(EfficiencyCurve, lo.get("hc", {}), "light_off.hc"),
        co=_build(EfficiencyCurve, lo.get("co", {}), "light_off.co"),
        nox=_build(EfficiencyCurve, lo.get("nox", {}), "light_off.nox"),
    )
    return Scenario(
        corridor=corridor,
        vehicle=_build(VehicleParams, d.get("vehicle", {}), "vehicle"),
        soc_model=_build(SocModelParams, soc_raw, "soc_model"),
        battery=_build(BatteryLimits, d.get("battery", {}), "battery"),
        rule_based=_build(RuleBasedConfig, d.get("rule_based", {}), "rule_based"),
        maps=_build(MapParams, maps_raw, "maps"),
        thermal=_build(ThermalParams, d.get("thermal", {}), "thermal"),
        curves=curves,
        enthalpies=_build(ReactionEnthalpies, d.get("reaction_heat", {}), "reaction_heat"),
        sim=_build(SimulationSettings, d.get("simulation", {}), "simulation"),
    )


def load_scenario(path: str | Path | None = None) -> Scenario:
    """Load a scenario YAML; with no path, return the built-in default."""
    if path is None:
        return default_scenario()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file: {exc}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from None
    return scenario_from_dict(doc)


def save_scenario(s: Scenario, path: str | Path) -> None:
    Path(path).write_text(
        yaml.safe_dump(scenario_to_dict(s), sort_keys=False, default_flow_style=False)
    )


def config_digest(s: Scenario) -> str:
    """Stable sha256 over the canonical JSON form of the scenario."""
    blob = json.dumps(scenario_to_dict(s), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
