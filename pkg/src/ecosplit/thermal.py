"""Engine heat balance, coolant and catalyst temperatures, emissions.

Fuel chemical power splits into brake work, exhaust enthalpy,
convective loss to moving air, radiator rejection above the thermostat,
and the remainder heats the lumped coolant node.  The exhaust stream
warms the catalyst brick, whose temperature sets a logistic conversion
efficiency per species; tailpipe flow is the engine-out flow times the
unconverted fraction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OutOfEnvelope
from .tables import Grid2D, bilinear

SPECIES = ("hc", "co", "nox")


@dataclass(frozen=True)
class ThermalParams:
    engine_thermal_mass_j_k: float = 200000.0   # lumped M_e * C_e
    cat_thermal_mass_j_k: float = 5000.0
    thermostat_temp_c: float = 88.0
    radiator_gain_w_k: float = 1500.0
    conv_coeff_base_w_k: float = 12.0
    conv_coeff_speed_w_k_mps: float = 1.0
    # exhaust enthalpy share grows with load: base + span*(p/ref)^exp
    exhaust_frac_base: float = 0.24
    exhaust_frac_span: float = 0.22
    exhaust_frac_ref_w: float = 72000.0
    exhaust_frac_exponent: float = 1.0
    coolant_heat_fraction: float = 0.30
    fuel_lhv_j_g: float = 43000.0
    cat_ambient_loss_w_k: float = 0.8
    exhaust_cp_j_g_k: float = 1.1
    stoich_afr: float = 14.7

    def __post_init__(self) -> None:
        if self.engine_thermal_mass_j_k <= 0 or self.cat_thermal_mass_j_k <= 0:
            raise ValueError("thermal masses must be positive")
        if not 0 < self.exhaust_frac_base < 1 or self.exhaust_frac_span < 0:
            raise ValueError("exhaust fraction terms must be positive")
        if not 0 < self.coolant_heat_fraction < 1:
            raise ValueError("coolant fraction must lie in (0, 1)")
        if self.exhaust_frac_ref_w <= 0 or self.exhaust_frac_exponent <= 0:
            raise ValueError("exhaust fraction shape terms must be positive")
        if self.exhaust_frac_base + self.exhaust_frac_span + self.coolant_heat_fraction >= 1:
            raise ValueError("heat fractions must leave room for brake work")
        for name in ("radiator_gain_w_k", "conv_coeff_base_w_k", "fuel_lhv_j_g",
                     "cat_ambient_loss_w_k", "exhaust_cp_j_g_k", "stoich_afr"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.conv_coeff_speed_w_k_mps < 0:
            raise ValueError("speed coefficient must be non-negative")

    def exhaust_fraction(self, p_eng_w: float) -> float:
        load = min(max(p_eng_w, 0.0) / self.exhaust_frac_ref_w, 1.0)
        return self.exhaust_frac_base + self.exhaust_frac_span * load ** self.exhaust_frac_exponent


@dataclass(frozen=True)
class ThermalState:
    t_cl_c: float
    t_cat_c: float


@dataclass(frozen=True)
class HeatSplit:
    q_fuel_w: float
    q_exhaust_w: float
    q_air_w: float
    q_radiator_w: float
    exhaust_flow_g_s: float
    exhaust_temp_c: float


@dataclass(frozen=True)
class EfficiencyCurve:
    """Logistic light-off curve: eta(T) = eta_max / (1 + exp(-k (T - t50)))."""

    t50_c: float
    steepness_per_c: float
    eta_max: float = 0.99

    def __post_init__(self) -> None:
        if self.steepness_per_c <= 0:
            raise ValueError("steepness must be positive")
        if not 0 < self.eta_max <= 1:
            raise ValueError("eta_max must lie in (0, 1]")


@dataclass(frozen=True)
class SpeciesCurves:
    hc: EfficiencyCurve
    co: EfficiencyCurve
    nox: EfficiencyCurve

    def for_species(self, name: str) -> EfficiencyCurve:
        return getattr(self, name)


@dataclass(frozen=True)
class EmissionRates:
    hc_g_s: float
    co_g_s: float
    nox_g_s: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.hc_g_s, self.co_g_s, self.nox_g_s)


ZERO_EMISSIONS = EmissionRates(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class EmissionMaps:
    """Engine-out g/s per species on the shared (omega, power) grid."""

    hc: Grid2D
    co: Grid2D
    nox: Grid2D


@dataclass(frozen=True)
class ReactionEnthalpies:
    """Exothermic heat release per gram converted; zero disables the term."""

    hc_j_g: float = 20000.0
    co_j_g: float = 10100.0
    nox_j_g: float = 3000.0

    def __post_init__(self) -> None:
        if self.hc_j_g < 0 or self.co_j_g < 0 or self.nox_j_g < 0:
            raise ValueError("enthalpies must be non-negative")


def heat_split(
    fuel_rate_g_s: float,
    p_eng_w: float,
    params: ThermalParams,
    t_cl_c: float,
    t_amb_c: float,
    v_mps: float,
) -> HeatSplit:
    """Partition fuel chemical power into the coolant-balance terms.

    The exhaust enthalpy share rises with engine load, so high-load
    operation runs hotter exhaust per gram of fuel.  Exhaust
    temperature follows from that enthalpy, the mass flow
    fuel*(1 + stoichiometric AFR), and the gas heat capacity, floored
    at ambient (also the engine-off value).
    """
    if fuel_rate_g_s < 0:
        raise ValueError("fuel rate must be non-negative")
    q_fuel = fuel_rate_g_s * params.fuel_lhv_j_g
    q_exh = params.exhaust_fraction(p_eng_w) * q_fuel
    q_air = (params.conv_coeff_base_w_k + params.conv_coeff_speed_w_k_mps * v_mps) * (
        t_cl_c - t_amb_c
    )
    q_rad = params.radiator_gain_w_k * max(0.0, t_cl_c - params.thermostat_temp_c)
    flow = fuel_rate_g_s * (1.0 + params.stoich_afr)
    if flow > 0:
        t_exh = max(t_amb_c, t_amb_c + q_exh / (params.exhaust_cp_j_g_k * flow))
    else:
        t_exh = t_amb_c
    return HeatSplit(q_fuel, q_exh, q_air, q_rad, flow, t_exh)


def coolant_step(
    t_cl_c: float,
    split: HeatSplit,
    p_eng_w: float,
    params: ThermalParams,
    q_heater_w: float = 0.0,
) -> float:
    """One-second explicit Euler update of the lumped coolant temperature."""
    net = (
        split.q_fuel_w
        - p_eng_w
        - split.q_exhaust_w
        - split.q_air_w
        - split.q_radiator_w
        - q_heater_w
    )
    return t_cl_c + net / params.engine_thermal_mass_j_k


def conversion_efficiency(t_cat_c: float, curve: EfficiencyCurve) -> float:
    """Converted fraction at the given brick temperature, in [0, eta_max]."""
    z = -curve.steepness_per_c * (t_cat_c - curve.t50_c)
    if z > 700.0:       # exp would overflow; efficiency is numerically zero
        return 0.0
    return curve.eta_max / (1.0 + math.exp(z))


def catalyst_step(
    t_cat_c: float,
    exhaust_flow_g_s: float,
    exhaust_temp_c: float,
    engine_out: EmissionRates,
    t_amb_c: float,
    params: ThermalParams,
    curves: SpeciesCurves,
    enthalpies: ReactionEnthalpies = ReactionEnthalpies(),
) -> float:
    """One-second update of the catalyst brick temperature.

    Heat in: exhaust convection cp*flow*(T_exh - T_cat) plus reaction
    heat from the converted mass; heat out: loss to ambient.
    """
    if exhaust_flow_g_s < 0:
        raise ValueError("exhaust flow must be non-negative")
    q_flow = params.exhaust_cp_j_g_k * exhaust_flow_g_s * (exhaust_temp_c - t_cat_c)
    q_reac = 0.0
    for name, dh in (
        ("hc", enthalpies.hc_j_g),
        ("co", enthalpies.co_j_g),
        ("nox", enthalpies.nox_j_g),
    ):
        rate = getattr(engine_out, f"{name}_g_s")
        q_reac += rate * conversion_efficiency(t_cat_c, curves.for_species(name)) * dh
    q_loss = params.cat_ambient_loss_w_k * (t_cat_c - t_amb_c)
    return t_cat_c + (q_flow + q_reac - q_loss) / params.cat_thermal_mass_j_k


def engine_out_emissions(omega_rad_s: float, p_eng_w: float, maps: EmissionMaps) -> EmissionRates:
    """Per-species engine-out rates from the bilinear maps; off means zero."""
    if p_eng_w == 0.0:
        if omega_rad_s != 0.0:
            raise ValueError("zero engine power requires zero engine speed")
        return ZERO_EMISSIONS
    if p_eng_w < 0:
        raise ValueError("engine power cannot be negative")
    return EmissionRates(
        float(bilinear(maps.hc, omega_rad_s, p_eng_w)),
        float(bilinear(maps.co, omega_rad_s, p_eng_w)),
        float(bilinear(maps.nox, omega_rad_s, p_eng_w)),
    )


def tailpipe_step(
    engine_out: EmissionRates, t_cat_c: float, curves: SpeciesCurves
) -> EmissionRates:
    """Unconverted fraction of each engine-out flow at the current brick temperature."""
    return EmissionRates(
        engine_out.hc_g_s * (1.0 - conversion_efficiency(t_cat_c, curves.hc)),
        engine_out.co_g_s * (1.0 - conversion_efficiency(t_cat_c, curves.co)),
        engine_out.nox_g_s * (1.0 - conversion_efficiency(t_cat_c, curves.nox)),
    )
