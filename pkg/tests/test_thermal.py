"""Heat split, coolant and catalyst dynamics, light-off, tailpipe flows."""
import math

import numpy as np
import pytest

from ecosplit.thermal import (
    SPECIES,
    EfficiencyCurve,
    EmissionRates,
    ReactionEnthalpies,
    SpeciesCurves,
    ThermalParams,
    catalyst_step,
    conversion_efficiency,
    coolant_step,
    engine_out_emissions,
    heat_split,
    tailpipe_step,
)


@pytest.fixture(scope="module")
def params():
    return ThermalParams()


@pytest.fixture(scope="module")
def curves(scenario):
    return scenario.curves


@pytest.fixture(scope="module")
def emaps(scenario):
    return scenario.emission_maps()


# ------------------------------------------------------------
# heat split and coolant node
# ------------------------------------------------------------

def test_exhaust_fraction_rises_with_load(params):
    assert params.exhaust_fraction(0.0) == 0.24
    assert params.exhaust_fraction(10000.0) == pytest.approx(0.27055555555555555, rel=1e-12)
    assert params.exhaust_fraction(36000.0) == pytest.approx(0.35, rel=1e-12)
    assert params.exhaust_fraction(72000.0) == pytest.approx(0.46, rel=1e-12)
    assert params.exhaust_fraction(90000.0) == params.exhaust_fraction(72000.0)
    assert params.exhaust_fraction(-500.0) == 0.24


def test_heat_split_hand_case(params):
    # 2 g/s at 36 kW, coolant 80, ambient 30, 10 m/s
    s = heat_split(2.0, 36000.0, params, 80.0, 30.0, 10.0)
    assert s.q_fuel_w == 86000.0
    assert s.q_exhaust_w == pytest.approx(0.35 * 86000.0, rel=1e-12)
    assert s.q_air_w == pytest.approx((12.0 + 10.0) * 50.0, rel=1e-12)
    assert s.q_radiator_w == 0.0                      # below the thermostat
    assert s.exhaust_flow_g_s == pytest.approx(2.0 * 15.7, rel=1e-12)
    assert s.exhaust_temp_c == pytest.approx(30.0 + 30100.0 / (1.1 * 31.4), rel=1e-12)


def test_heat_split_radiator_opens_above_thermostat(params):
    s = heat_split(2.0, 36000.0, params, 95.0, 30.0, 10.0)
    assert s.q_radiator_w == pytest.approx(1500.0 * 7.0, rel=1e-12)


def test_heat_split_engine_off_cools_toward_ambient(params):
    s = heat_split(0.0, 0.0, params, 80.0, 30.0, 12.0)
    assert s.q_fuel_w == 0.0
    assert s.q_exhaust_w == 0.0
    assert s.exhaust_flow_g_s == 0.0
    assert s.exhaust_temp_c == 30.0
    assert s.q_air_w > 0
    t1 = coolant_step(80.0, s, 0.0, params)
    assert t1 < 80.0


def test_heat_split_rejects_negative_fuel(params):
    with pytest.raises(ValueError):
        heat_split(-0.1, 0.0, params, 80.0, 30.0, 0.0)


def test_coolant_energy_balance_closes_over_long_random_trace(params):
    # M * (T_end - T_0) must equal the summed net heat to accumulator
    # precision: nothing is created or lost by the update
    rng = np.random.default_rng(29)
    t_cl = 70.0
    t0 = t_cl
    net_sum = 0.0
    for _ in range(10_000):
        fuel = float(rng.uniform(0.0, 4.0))
        p_eng = float(rng.uniform(0.0, 60000.0)) if fuel > 0.05 else 0.0
        v = float(rng.uniform(0.0, 16.0))
        s = heat_split(fuel, p_eng, params, t_cl, 30.0, v)
        net = s.q_fuel_w - p_eng - s.q_exhaust_w - s.q_air_w - s.q_radiator_w
        net_sum += net
        t_cl = coolant_step(t_cl, s, p_eng, params)
    lhs = params.engine_thermal_mass_j_k * (t_cl - t0)
    assert lhs == pytest.approx(net_sum, rel=1e-9, abs=1e-3)


def test_coolant_step_heater_draw_cools(params):
    s = heat_split(1.0, 10000.0, params, 70.0, 30.0, 5.0)
    plain = coolant_step(70.0, s, 10000.0, params)
    heated = coolant_step(70.0, s, 10000.0, params, q_heater_w=3000.0)
    assert heated == pytest.approx(plain - 3000.0 / params.engine_thermal_mass_j_k, rel=1e-12)


# ------------------------------------------------------------
# light-off curves
# ------------------------------------------------------------

def test_conversion_efficiency_pins(curves):
    # half of eta_max exactly at the midpoint temperature
    assert conversion_efficiency(200.0, curves.co) == pytest.approx(0.495, rel=1e-12)
    assert conversion_efficiency(200.0, curves.nox) == pytest.approx(0.495, rel=1e-12)
    assert conversion_efficiency(250.0, curves.hc) == pytest.approx(0.495, rel=1e-12)
    # fully lit by 300 C for every default curve
    for name in SPECIES:
        eta = conversion_efficiency(300.0, curves.for_species(name))
        assert eta > 0.98
        assert eta < 0.99
    assert conversion_efficiency(300.0, curves.co) == pytest.approx(
        0.99 / (1.0 + math.exp(-5.0)), rel=1e-12
    )


def test_conversion_efficiency_is_monotone_and_bounded(curves):
    temps = np.linspace(-40.0, 900.0, 400)
    for name in SPECIES:
        curve = curves.for_species(name)
        etas = [conversion_efficiency(float(t), curve) for t in temps]
        assert all(b >= a for a, b in zip(etas, etas[1:]))
        assert all(0.0 <= e <= curve.eta_max for e in etas)
    # extreme cold underflows to exactly zero instead of overflowing exp
    assert conversion_efficiency(-20000.0, curves.co) == 0.0


def test_efficiency_curve_validation():
    with pytest.raises(ValueError):
        EfficiencyCurve(t50_c=200.0, steepness_per_c=0.0)
    with pytest.raises(ValueError):
        EfficiencyCurve(t50_c=200.0, steepness_per_c=0.05, eta_max=1.2)


# ------------------------------------------------------------
# catalyst brick
# ------------------------------------------------------------

def test_catalyst_step_hand_case_convection_only(params, curves):
    # 10 g/s of 500 C gas onto a 100 C brick, no reactions
    t1 = catalyst_step(
        100.0, 10.0, 500.0, EmissionRates(0.0, 0.0, 0.0), 30.0, params, curves
    )
    q_flow = 1.1 * 10.0 * 400.0
    q_loss = 0.8 * 70.0
    assert t1 == pytest.approx(100.0 + (q_flow - q_loss) / 5000.0, rel=1e-12)


def test_catalyst_step_reaction_heat_hand_case(params, curves):
    # CO only, brick at its midpoint temperature: eta is exactly 0.495
    eo = EmissionRates(0.0, 0.05, 0.0)
    dh = ReactionEnthalpies(hc_j_g=0.0, co_j_g=10100.0, nox_j_g=0.0)
    t1 = catalyst_step(200.0, 0.0, 30.0, eo, 30.0, params, curves, dh)
    q_reac = 0.05 * 0.495 * 10100.0
    q_loss = 0.8 * 170.0
    assert t1 == pytest.approx(200.0 + (q_reac - q_loss) / 5000.0, rel=1e-12)


def test_catalyst_cools_without_flow(params, curves):
    t1 = catalyst_step(300.0, 0.0, 30.0, EmissionRates(0.0, 0.0, 0.0), 30.0, params, curves)
    assert t1 < 300.0
    # and never cools below ambient
    t2 = catalyst_step(30.0, 0.0, 30.0, EmissionRates(0.0, 0.0, 0.0), 30.0, params, curves)
    assert t2 == 30.0


def test_catalyst_step_rejects_negative_flow(params, curves):
    with pytest.raises(ValueError):
        catalyst_step(100.0, -1.0, 400.0, EmissionRates(0.0, 0.0, 0.0), 30.0, params, curves)


# ------------------------------------------------------------
# emissions
# ------------------------------------------------------------

def test_engine_out_maps_match_their_shaping_formulas_at_nodes(scenario, emaps):
    # the grids sample EI(p) * fuel(omega, p); nodes must be exact
    mp = scenario.maps
    for om in emaps.co.x:
        for p in emaps.co.y[1:]:
            fuel = (p / mp.willans_efficiency + mp.friction_w_per_rad_s * om) / mp.fuel_lhv_j_g
            rates = engine_out_emissions(float(om), float(p), emaps)
            assert rates.co_g_s == pytest.approx(mp.co_ei * fuel, rel=1e-12)
            over = max(0.0, (p - mp.nox_ei_knee_w) / (mp.p_max_w - mp.nox_ei_knee_w))
            want_nox = (mp.nox_ei_base + mp.nox_ei_span * over**mp.nox_ei_exponent) * fuel
            assert rates.nox_g_s == pytest.approx(want_nox, rel=1e-12)
            want_hc = (
                mp.hc_ei_base
                * (1.0 + mp.hc_low_load_boost * math.exp(-p / mp.hc_low_load_scale_w))
                * fuel
            )
            assert rates.hc_g_s == pytest.approx(want_hc, rel=1e-12)


def test_nox_index_is_flat_below_the_knee(scenario, emaps):
    # the NOx-to-fuel ratio sits at the base index up to the last grid
    # node below the knee; interpolation blends toward the knee itself
    mp = scenario.maps
    last_flat_node = float(emaps.nox.y[emaps.nox.y <= mp.nox_ei_knee_w][-1])
    for p in (5000.0, 15000.0, 25000.0, last_flat_node):
        om = 150.0
        fuel = (p / mp.willans_efficiency + mp.friction_w_per_rad_s * om) / mp.fuel_lhv_j_g
        rates = engine_out_emissions(om, p, emaps)
        assert rates.nox_g_s / fuel == pytest.approx(mp.nox_ei_base, rel=1e-9)
    # and climbs steeply above it
    lo = engine_out_emissions(150.0, 30000.0, emaps)
    hi = engine_out_emissions(150.0, 60000.0, emaps)
    fuel_lo = (30000.0 / mp.willans_efficiency + 60.0 * 150.0) / mp.fuel_lhv_j_g
    fuel_hi = (60000.0 / mp.willans_efficiency + 60.0 * 150.0) / mp.fuel_lhv_j_g
    assert hi.nox_g_s / fuel_hi > 2.0 * (lo.nox_g_s / fuel_lo)


def test_hc_index_is_worst_at_light_load(emaps):
    light = engine_out_emissions(105.0, 4000.0, emaps)
    heavy = engine_out_emissions(260.0, 48000.0, emaps)
    assert light.hc_g_s / light.co_g_s > heavy.hc_g_s / heavy.co_g_s


def test_engine_out_off_is_zero(emaps):
    assert engine_out_emissions(0.0, 0.0, emaps).as_tuple() == (0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        engine_out_emissions(150.0, 0.0, emaps)
    with pytest.raises(ValueError):
        engine_out_emissions(150.0, -10.0, emaps)


def test_tailpipe_never_exceeds_engine_out(curves, emaps):
    rng = np.random.default_rng(37)
    for _ in range(300):
        om = float(rng.uniform(90.0, 380.0))
        p = float(rng.uniform(1000.0, 72000.0))
        t_cat = float(rng.uniform(-20.0, 800.0))
        eo = engine_out_emissions(om, p, emaps)
        tp = tailpipe_step(eo, t_cat, curves)
        for name in SPECIES:
            out = getattr(tp, f"{name}_g_s")
            raw = getattr(eo, f"{name}_g_s")
            eta = conversion_efficiency(t_cat, curves.for_species(name))
            assert 0.0 <= out <= raw
            assert out == pytest.approx(raw * (1.0 - eta), rel=1e-12)


def test_tailpipe_cold_cat_passes_everything_through(curves):
    eo = EmissionRates(0.01, 0.05, 0.004)
    tp = tailpipe_step(eo, -20000.0, curves)
    assert tp.as_tuple() == eo.as_tuple()


def test_thermal_params_validation():
    with pytest.raises(ValueError):
        ThermalParams(engine_thermal_mass_j_k=0.0)
    with pytest.raises(ValueError):
        ThermalParams(coolant_heat_fraction=1.0)
    with pytest.raises(ValueError):
        ThermalParams(exhaust_frac_base=0.5, exhaust_frac_span=0.3)   # no room for work
    with pytest.raises(ValueError):
        ThermalParams(radiator_gain_w_k=0.0)
    with pytest.raises(ValueError):
        ThermalParams(conv_coeff_speed_w_k_mps=-1.0)
    with pytest.raises(ValueError):
        ReactionEnthalpies(co_j_g=-1.0)


def test_species_lookup(curves):
    assert SPECIES == ("hc", "co", "nox")
    assert curves.for_species("hc") is curves.hc
    assert curves.for_species("nox") is curves.nox
