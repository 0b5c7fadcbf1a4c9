"""Release acceptance suite: one test per criterion, one verdict line each.

The fleet criteria share two 50-vehicle batches (seed 7, cold and hot
catalyst start) built once per module.  Each test prints a single
``criterion NN: PASS/FAIL`` line with the measured numbers so the run
log doubles as the acceptance record.
"""
import math
import time

import numpy as np
import pytest

from ecosplit.cli import main
from ecosplit.dp import solve
from ecosplit.errors import NoFeasiblePolicy
from ecosplit.harness import combo_means, improvement_indices, run_batch
from ecosplit.planner import trig_segment
from ecosplit.thermal import (
    EmissionRates,
    SPECIES,
    conversion_efficiency,
    coolant_step,
    heat_split,
    tailpipe_step,
)
from ecosplit.traffic import SignalTiming, evolve_queue

from dp_lattice import enumerate_value, lattice_config, random_problem

FLEET_N = 50
FLEET_SEED = 7

VERDICT_LINES: list[str] = []    # replayed by conftest in the terminal summary


def _verdict(num: int, ok: bool, detail: str) -> None:
    line = f"criterion {num:02d}: {'PASS' if ok else 'FAIL'} ({detail})"
    VERDICT_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def fleet_cold(scenario):
    t0 = time.perf_counter()
    batch = run_batch(scenario, n=FLEET_N, seed=FLEET_SEED, t_cat0_c=50.0)
    elapsed = time.perf_counter() - t0
    assert batch.failures == []
    return batch, elapsed


@pytest.fixture(scope="module")
def fleet_hot(scenario):
    batch = run_batch(scenario, n=FLEET_N, seed=FLEET_SEED, t_cat0_c=300.0)
    assert batch.failures == []
    return batch


def _eq(batch, combo, i):
    return batch.cases[combo][i].summary["equivalent_energy_kwh"]


def test_criterion_01_optimizer_matches_exhaustive_search():
    # randomized small problems where every reachable state lands on a
    # grid node, so interpolation is exact and enumeration is decisive
    rng = np.random.default_rng(424242)
    config = lattice_config()
    matched = 0
    infeasible = 0
    max_rel = 0.0
    t0 = time.perf_counter()
    trials = 0
    while matched < 25 and trials < 60:
        trials += 1
        problem = random_problem(rng, config)
        expect = enumerate_value(problem)
        if math.isinf(expect):
            with pytest.raises(NoFeasiblePolicy):
                solve(problem)
            infeasible += 1
            continue
        got = solve(problem).value
        rel = abs(got - expect) / max(1.0, abs(expect))
        max_rel = max(max_rel, rel)
        assert rel <= 1e-6
        matched += 1
    elapsed = time.perf_counter() - t0
    _verdict(
        1,
        matched >= 25 and elapsed < 10.0,
        f"{matched} matched (+{infeasible} agreed infeasible), "
        f"max rel err {max_rel:.2e}, {elapsed:.2f}s",
    )


def test_criterion_02_optimal_split_dominates_rule(fleet_cold):
    batch, elapsed = fleet_cold
    violations = sum(
        1
        for i in range(batch.n)
        if _eq(batch, "eco_dp", i) > _eq(batch, "eco_rule", i)
    )
    mean_saving = improvement_indices(batch)["equivalent_energy_pct"]["mean"]
    ok = (
        violations == 0
        and mean_saving is not None
        and 5.0 <= mean_saving <= 30.0
        and elapsed < 300.0
    )
    _verdict(
        2,
        ok,
        f"{violations} dominance violations, mean saving {mean_saving:+.1f}% "
        f"(band 5..30), batch {elapsed:.1f}s",
    )


def test_criterion_03_charge_sustainability(fleet_cold, fleet_hot):
    worst = 0.0
    for batch in (fleet_cold[0], fleet_hot):
        for lst in batch.cases.values():
            for case in lst:
                worst = max(worst, abs(case.summary["delta_soc"]))
    _verdict(3, worst <= 0.05, f"max |delta SOC| {worst:.4f} (limit 0.05)")


def test_criterion_04_smoother_driving_runs_cooler(fleet_cold):
    m = combo_means(fleet_cold[0])
    cat_base = m["baseline_rule"]["mean_t_cat_c"]
    cat_eco = m["eco_rule"]["mean_t_cat_c"]
    cat_dp = m["eco_dp"]["mean_t_cat_c"]
    cl_base = m["baseline_rule"]["mean_t_cl_c"]
    cl_eco = m["eco_rule"]["mean_t_cl_c"]
    ok = cat_eco < cat_base and cl_eco < cl_base and cat_eco < cat_dp < cat_base
    _verdict(
        4,
        ok,
        f"T_cat {cat_eco:.1f} < {cat_dp:.1f} < {cat_base:.1f} degC, "
        f"T_cl {cl_eco:.2f} < {cl_base:.2f} degC",
    )


def test_criterion_05_eco_planning_delays_light_off(fleet_cold):
    m = combo_means(fleet_cold[0])
    t_base = m["baseline_rule"]["t_cat_200_s"]
    t_eco = m["eco_rule"]["t_cat_200_s"]
    _verdict(
        5,
        t_eco > t_base,
        f"mean time to 200 degC: eco {t_eco:.0f}s vs baseline {t_base:.0f}s "
        f"(dp pair: {m['eco_dp']['t_cat_200_s']:.0f}s vs "
        f"{m['baseline_dp']['t_cat_200_s']:.0f}s)",
    )


def test_criterion_06_cold_start_species_split(fleet_cold):
    idx = improvement_indices(fleet_cold[0], ("eco", "dp"), ("baseline", "rule"))
    hc = idx["hc_pct"]["mean"]
    co = idx["co_pct"]["mean"]
    nox = idx["nox_pct"]["mean"]
    ok = co > 0.0 and nox > 0.0 and hc < co and hc < nox
    _verdict(
        6,
        ok,
        f"cold-start improvement HC {hc:+.1f}%, CO {co:+.1f}%, NOx {nox:+.1f}%",
    )


def test_criterion_07_hot_start_improves_all_species(fleet_hot):
    idx = improvement_indices(fleet_hot, ("eco", "rule"), ("baseline", "rule"))
    hc = idx["hc_pct"]["mean"]
    co = idx["co_pct"]["mean"]
    nox = idx["nox_pct"]["mean"]
    ok = hc > 0.0 and co > 0.0 and nox > 0.0
    _verdict(
        7,
        ok,
        f"hot-start improvement HC {hc:+.1f}%, CO {co:+.1f}%, NOx {nox:+.1f}%",
    )


def test_criterion_08_conservation_identities(scenario, fleet_cold):
    params = scenario.thermal
    curves = scenario.curves
    rng = np.random.default_rng(31)

    # coolant energy balance over a long random trace
    t_cl = 70.0
    t_start = t_cl
    net_sum = 0.0
    for _ in range(10_000):
        fuel = float(rng.uniform(0.0, 4.0))
        p_eng = float(rng.uniform(0.0, 60000.0)) if fuel > 0.05 else 0.0
        v = float(rng.uniform(0.0, 16.0))
        s = heat_split(fuel, p_eng, params, t_cl, 30.0, v)
        net_sum += s.q_fuel_w - p_eng - s.q_exhaust_w - s.q_air_w - s.q_radiator_w
        t_cl = coolant_step(t_cl, s, p_eng, params)
    lhs = params.engine_thermal_mass_j_k * (t_cl - t_start)
    energy_ok = lhs == pytest.approx(net_sum, rel=1e-9, abs=1e-3)

    # the catalyst never emits more than the engine feeds it
    mass_ok = True
    for _ in range(300):
        rates = EmissionRates(
            float(rng.uniform(0.0, 0.1)),
            float(rng.uniform(0.0, 0.5)),
            float(rng.uniform(0.0, 0.2)),
        )
        pipe = tailpipe_step(rates, float(rng.uniform(0.0, 500.0)), curves)
        mass_ok &= all(
            0.0 <= p <= e for p, e in zip(pipe.as_tuple(), rates.as_tuple())
        )
    case = fleet_cold[0].cases["baseline_rule"][0]
    mass_ok &= bool(np.all(case.tailpipe_g_s <= case.engine_out_g_s + 1e-15))

    # trapezoid distance of a half-cosine ramp equals the analytic value
    trig_err = 0.0
    for _ in range(500):
        v0 = float(rng.uniform(0.0, 17.0))
        vf = float(rng.uniform(0.0, 17.0))
        dur = int(rng.integers(1, 40))
        seg = trig_segment(v0, vf, float(dur))
        dist = float(np.trapezoid(seg, dx=1.0))
        expect = 0.5 * (v0 + vf) * dur
        trig_err = max(trig_err, abs(dist - expect) / max(1.0, expect))
    trig_ok = trig_err <= 1e-9

    # queue bookkeeping is exact against the arrival/departure recurrence
    queue_ok = True
    for _ in range(20):
        cycle = float(rng.integers(30, 120))
        green = float(rng.integers(5, int(cycle) - 5))
        start = float(rng.integers(0, int(cycle - green) + 1))
        sig = SignalTiming(cycle, start, green)
        horizon = int(rng.integers(50, 300))
        arrivals = rng.uniform(0.0, 2500.0, horizon)
        sat = float(rng.uniform(900.0, 2400.0))
        q = q0 = float(rng.uniform(0.0, 12.0))
        trace = evolve_queue(sig, arrivals, sat, 0.0, horizon, initial_queue=q0)
        for k in range(horizon):
            cap = sat / 3600.0 if sig.is_green(float(k)) else 0.0
            a = arrivals[k] / 3600.0
            d = min(q + a, cap)
            q = q + a - d
            queue_ok &= trace[k + 1].queue_length == q

    _verdict(
        8,
        energy_ok and mass_ok and trig_ok and queue_ok,
        f"coolant balance {'exact' if energy_ok else 'BROKEN'}, "
        f"tailpipe<=engine-out {'holds' if mass_ok else 'BROKEN'}, "
        f"ramp distance err {trig_err:.1e}, "
        f"queue ledger {'exact' if queue_ok else 'BROKEN'}",
    )


def test_criterion_09_batch_runs_are_byte_identical(tmp_path):
    dirs = (tmp_path / "a", tmp_path / "b")
    for d in dirs:
        code = main(
            ["batch", "--seed", str(FLEET_SEED), "--n", str(FLEET_N), "--out", str(d)]
        )
        assert code == 0
    names_a = sorted(p.name for p in dirs[0].iterdir())
    names_b = sorted(p.name for p in dirs[1].iterdir())
    same = names_a == names_b
    differing = 0
    for name in names_a:
        if (dirs[0] / name).read_bytes() != (dirs[1] / name).read_bytes():
            differing += 1
    _verdict(
        9,
        same and differing == 0,
        f"{len(names_a)} files compared, {differing} differ",
    )


def test_criterion_10_light_off_curve_pins(scenario):
    curves = scenario.curves
    co_200 = conversion_efficiency(200.0, curves.co)
    nox_200 = conversion_efficiency(200.0, curves.nox)
    hc_250 = conversion_efficiency(250.0, curves.hc)
    hot = {s: conversion_efficiency(300.0, curves.for_species(s)) for s in SPECIES}
    ok = (
        abs(co_200 - 0.495) <= 1e-12
        and abs(nox_200 - 0.495) <= 1e-12
        and abs(hc_250 - 0.495) <= 1e-12
        and all(0.98 < v <= 0.99 for v in hot.values())
    )
    _verdict(
        10,
        ok,
        f"eta(200) CO/NOx = {co_200:.3f}/{nox_200:.3f}, eta(250) HC = {hc_250:.3f}, "
        f"eta(300) = " + "/".join(f"{hot[s]:.4f}" for s in SPECIES),
    )
