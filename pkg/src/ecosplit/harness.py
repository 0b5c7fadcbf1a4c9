"""End-to-end simulation: trip planning, power split, thermal chain, export.

A case runs one vehicle over the corridor in 1 Hz lockstep: the chosen
planner produces the full speed profile, the chosen controller splits
the traction demand between engine and battery, and the thermal and
emission models run along the result.  A batch repeats this for a
seeded fleet under all four planner/controller combinations and
aggregates comparison metrics.  Everything is sequential and
deterministic for a given seed; exports use fixed float formatting and
sorted JSON keys so repeated runs are byte-identical.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import Scenario, config_digest
from .dp import DpProblem, TerminalCost, solve
from .errors import NoWindowInHorizon, ZeroBaseline
from .planner import (
    LegPlan,
    Mode,
    PlannerContext,
    SpeedProfile,
    plan_baseline_profile,
    plan_eco_profile,
    plan_terminal_stop,
)
from .powertrain import (
    ControlDecision,
    EngineOp,
    PowertrainState,
    rule_based_split,
    soc_step,
    traction_power,
)
from .thermal import (
    SPECIES,
    EmissionRates,
    engine_out_emissions,
    heat_split,
    coolant_step,
    catalyst_step,
    tailpipe_step,
)
from .traffic import Intersection, evolve_queue, predict_green_window

COMBOS = (("baseline", "rule"), ("baseline", "dp"), ("eco", "rule"), ("eco", "dp"))

CSV_HEADER = [
    "t", "v_mps", "mode", "p_trac_w", "e_mode", "p_bat_w", "p_eng_w", "soc",
    "t_cl_c", "t_cat_c",
    "hc_engine_g_s", "co_engine_g_s", "nox_engine_g_s",
    "hc_tailpipe_g_s", "co_tailpipe_g_s", "nox_tailpipe_g_s",
]

INDEX_HEADER = [
    "vehicle", "planner", "controller", "v0_mps", "fuel_g", "delta_soc",
    "equivalent_energy_kwh", "duration_s", "trace_file",
]

SUMMARY_SCHEMA_VERSION = 1


def combo_key(planner: str, controller: str) -> str:
    return f"{planner}_{controller}"


# ---------------------------------------------------------------------------
# trip planning

@dataclass
class TripPlan:
    """Stitched full-route profile plus the per-leg plans behind it."""

    profile: SpeedProfile
    legs: list[LegPlan]
    crossing_times: list[float]    # one entry per intersection


def _queue_at_green_onset(inter: Intersection, cycle: int, warmup_s: float):
    """Standing queue when the indexed green opens, after a warmup period.

    The point queue starts empty ``warmup_s`` before the onset and
    accumulates the approach's arrival rate through the intervening
    signal phases, so by the onset it reflects the periodic steady
    state of the approach.
    """
    onset, _ = inter.signal.green_interval(cycle)
    horizon = max(1, int(round(warmup_s)))
    trace = evolve_queue(
        inter.signal,
        np.full(horizon, inter.lane_arrival_rate_vph),
        inter.saturation_flow_vph,
        onset - horizon,
        horizon,
        initial_queue=0.0,
        jam_density=inter.jam_density_vpkm,
    )
    return trace[-1]


def _green_window_for(inter: Intersection, t_now: float, pos: float, vlim: float, warmup_s: float):
    """First usable green window at this approach, on the absolute clock."""
    t_min = t_now + (inter.position_m - pos) / vlim
    first_cycle = inter.signal.cycle_index(t_min)
    for cycle in range(first_cycle, first_cycle + 10):
        queue = _queue_at_green_onset(inter, cycle, warmup_s)
        window = predict_green_window(
            inter.signal, queue, inter.saturation_flow_vph, cycle
        )
        if window.latest_pass >= t_min - 1e-9:
            return window
    raise NoWindowInHorizon(
        f"no reachable green window at {inter.position_m:.0f} m within 10 cycles"
    )


def _stitch_legs(legs: list[LegPlan]) -> SpeedProfile:
    parts = [legs[0].profile.speeds]
    modes = list(legs[0].profile.modes)
    for leg in legs[1:]:
        s = leg.profile.speeds
        if abs(float(s[0]) - float(parts[-1][-1])) > 1e-9:
            raise RuntimeError("leg speeds do not join continuously")
        parts.append(s[1:])
        modes.extend(leg.profile.modes[1:])
    return SpeedProfile(legs[0].profile.t0, np.concatenate(parts), modes)


def plan_trip(scenario: Scenario, v0_mps: float, planner: str) -> TripPlan:
    """Plan the whole corridor for one vehicle, ending stopped at its end.

    The eco planner chains one green-window leg per intersection; the
    baseline planner chains reactive legs that drive at the limit and
    brake on red.  Both finish with a planned stop exactly at the
    corridor end, so trips of either kind compare like with like (no
    kinetic energy left on the table) and the trapezoid distance closes
    on the route length.
    """
    if planner not in ("baseline", "eco"):
        raise ValueError("planner must be 'baseline' or 'eco'")
    corridor = scenario.corridor
    sim = scenario.sim
    if v0_mps > corridor.speed_limit_mps + 1e-9:
        raise ValueError("initial speed above the corridor speed limit")
    if corridor.length_m <= 1e-9 and not corridor.intersections:
        if v0_mps > 1e-9:
            raise ValueError("zero-length corridor requires a standstill start")
        return TripPlan(SpeedProfile(0.0, np.array([0.0]), [Mode.STOP]), [], [])

    t, pos, v = 0.0, 0.0, float(v0_mps)
    legs: list[LegPlan] = []
    crossings: list[float] = []
    for inter in corridor.intersections:
        ctx_kwargs = dict(
            t0=t,
            current_position=pos,
            current_speed=v,
            stopbar_position=inter.position_m,
            speed_limit=corridor.speed_limit_mps,
            a_max=sim.a_max_mps2,
            a_min=sim.a_min_mps2,
        )
        if planner == "eco":
            window = _green_window_for(
                inter, t, pos, corridor.speed_limit_mps, sim.queue_warmup_s
            )
            ctx = PlannerContext(green_window=window, **ctx_kwargs)
            leg = plan_eco_profile(ctx, signal=inter.signal)
        else:
            ctx = PlannerContext(green_window=None, **ctx_kwargs)
            leg = plan_baseline_profile(ctx, inter.signal)
        legs.append(leg)
        crossings.append(leg.crossing_time)
        t += leg.profile.duration
        pos = leg.end_position
        v = leg.end_speed

    ctx = PlannerContext(
        t0=t,
        current_position=pos,
        current_speed=v,
        stopbar_position=corridor.length_m,
        speed_limit=corridor.speed_limit_mps,
        green_window=None,
        a_max=sim.a_max_mps2,
        a_min=sim.a_min_mps2,
    )
    legs.append(plan_terminal_stop(ctx))
    profile = _stitch_legs(legs)
    profile.validate(
        corridor.speed_limit_mps,
        sim.a_max_mps2,
        sim.a_min_mps2,
        route_length=corridor.length_m,
    )
    return TripPlan(profile, legs, crossings)


# ---------------------------------------------------------------------------
# case simulation

@dataclass
class CaseResult:
    planner: str
    controller: str
    v0_mps: float
    profile: SpeedProfile
    p_trac_w: np.ndarray            # one per sample
    decisions: list[ControlDecision]  # one per step
    soc: np.ndarray                 # one per sample
    fuel_g_s: np.ndarray            # one per step
    t_cl_c: np.ndarray              # one per sample
    t_cat_c: np.ndarray             # one per sample
    engine_out_g_s: np.ndarray      # (steps, species) in SPECIES order
    tailpipe_g_s: np.ndarray        # (steps, species)
    soc_saturation_steps: int
    summary: dict = field(default_factory=dict)

    @property
    def fuel_total_g(self) -> float:
        return float(np.sum(self.fuel_g_s))

    @property
    def delta_soc(self) -> float:
        return float(self.soc[-1] - self.soc[0])


@dataclass(frozen=True)
class EnergyFactors:
    fuel_lhv_j_g: float
    battery_capacity_kwh: float


def energy_factors(scenario: Scenario) -> EnergyFactors:
    return EnergyFactors(scenario.thermal.fuel_lhv_j_g, scenario.battery.capacity_kwh)


def equivalent_energy(fuel_g: float, delta_soc: float, factors: EnergyFactors) -> float:
    """Fuel energy plus the energy value of the SOC deficit, kWh.

    A negative SOC change is priced as battery energy to be made up; a
    positive change is credited symmetrically.
    """
    return fuel_g * factors.fuel_lhv_j_g / 3.6e6 + (-delta_soc) * factors.battery_capacity_kwh


def emission_improvement(z_base: float, z_test: float) -> float:
    """Percent reduction relative to the base case; negative = got worse."""
    if z_base == 0.0:
        raise ZeroBaseline("improvement undefined for a zero baseline")
    return (z_base - z_test) / z_base * 100.0


def _soc_grid(scenario: Scenario) -> np.ndarray:
    m = scenario.soc_model
    n = int(round((m.soc_max - m.soc_min) / scenario.sim.soc_grid_step)) + 1
    return np.linspace(m.soc_min, m.soc_max, n)


def _p_bat_grid(scenario: Scenario) -> np.ndarray:
    b = scenario.battery
    n = int(round((b.p_max_w - b.p_min_w) / scenario.sim.p_bat_grid_step_w)) + 1
    return np.linspace(b.p_min_w, b.p_max_w, n)


def run_case(
    scenario: Scenario,
    *,
    planner: str | None = None,
    controller: str | None = None,
    v0_mps: float | None = None,
    t_cat0_c: float | None = None,
    trip: TripPlan | None = None,
) -> CaseResult:
    """Simulate one vehicle end to end and attach its summary metrics.

    Arguments default to the scenario's own settings; a pre-planned
    trip can be passed in so several controllers reuse one profile.
    """
    sim = scenario.sim
    planner = sim.planner if planner is None else planner
    controller = sim.controller if controller is None else controller
    if controller not in ("rule", "dp"):
        raise ValueError("controller must be 'rule' or 'dp'")
    v0 = sim.v0_kmh / 3.6 if v0_mps is None else float(v0_mps)
    t_cat0 = sim.t_cat0_c if t_cat0_c is None else float(t_cat0_c)
    if trip is None:
        trip = plan_trip(scenario, v0, planner)
    profile = trip.profile
    speeds = profile.speeds
    steps = len(speeds) - 1

    cfg = scenario.powertrain()
    demand = traction_power(profile, scenario.vehicle)
    step_demand = demand[:steps]

    decisions: list[ControlDecision] = []
    ops: list[EngineOp] = []
    soc = np.empty(steps + 1)
    soc[0] = sim.soc0
    fuel = np.zeros(steps)
    saturated_steps = 0
    if controller == "dp" and steps > 0:
        problem = DpProblem(
            demand_w=step_demand,
            p_aux_w=sim.p_aux_w,
            soc0=sim.soc0,
            soc_grid=_soc_grid(scenario),
            p_bat_grid=_p_bat_grid(scenario),
            terminal=TerminalCost(sim.soc0, sim.terminal_weight_g),
            powertrain=cfg,
            ac_on=sim.ac_on,
        )
        solution = solve(problem)
        decisions = solution.decisions
        ops = solution.engine_ops
        soc = solution.soc_trace
        fuel = solution.fuel_trace
    elif steps > 0:
        state = PowertrainState(sim.soc0)
        for k in range(steps):
            dec, op = rule_based_split(
                float(step_demand[k]), sim.p_aux_w, float(speeds[k]), state, cfg
            )
            state, clipped = soc_step(
                state, dec.p_mg_w, sim.p_aux_w, sim.ac_on, cfg.soc_model,
                engine_on=dec.e_mode == 2,
            )
            saturated_steps += int(clipped)
            decisions.append(dec)
            ops.append(op)
            fuel[k] = op.fuel_g_s
            soc[k + 1] = state.soc

    maps = scenario.emission_maps()
    thermal = scenario.thermal
    t_cl = np.empty(steps + 1)
    t_cat = np.empty(steps + 1)
    t_cl[0] = sim.t_cl0_c
    t_cat[0] = t_cat0
    engine_out = np.zeros((steps, len(SPECIES)))
    tailpipe = np.zeros((steps, len(SPECIES)))
    for k in range(steps):
        op = ops[k]
        split = heat_split(
            op.fuel_g_s, op.p_eng_w, thermal, t_cl[k], sim.t_amb_c, float(speeds[k])
        )
        t_cl[k + 1] = coolant_step(t_cl[k], split, op.p_eng_w, thermal)
        rates = engine_out_emissions(op.omega_rad_s, op.p_eng_w, maps)
        if decisions[k].e_mode == 2 and (k == 0 or decisions[k - 1].e_mode == 1):
            # wall wetting and enrichment on every engine start puff out HC
            rates = EmissionRates(
                rates.hc_g_s + scenario.maps.hc_start_g, rates.co_g_s, rates.nox_g_s
            )
        pipe = tailpipe_step(rates, t_cat[k], scenario.curves)
        t_cat[k + 1] = catalyst_step(
            t_cat[k],
            split.exhaust_flow_g_s,
            split.exhaust_temp_c,
            rates,
            sim.t_amb_c,
            thermal,
            scenario.curves,
            scenario.enthalpies,
        )
        engine_out[k] = rates.as_tuple()
        tailpipe[k] = pipe.as_tuple()

    result = CaseResult(
        planner=planner,
        controller=controller,
        v0_mps=v0,
        profile=profile,
        p_trac_w=demand,
        decisions=decisions,
        soc=soc,
        fuel_g_s=fuel,
        t_cl_c=t_cl,
        t_cat_c=t_cat,
        engine_out_g_s=engine_out,
        tailpipe_g_s=tailpipe,
        soc_saturation_steps=saturated_steps,
    )
    result.summary = _case_summary(result, scenario)
    return result


def _first_time_at(trace: np.ndarray, threshold: float) -> float | None:
    hits = np.nonzero(trace >= threshold)[0]
    return float(hits[0]) if len(hits) else None


def _case_summary(case: CaseResult, scenario: Scenario) -> dict:
    factors = energy_factors(scenario)
    eo = {s: float(case.engine_out_g_s[:, i].sum()) for i, s in enumerate(SPECIES)}
    tp = {s: float(case.tailpipe_g_s[:, i].sum()) for i, s in enumerate(SPECIES)}
    conversion = {
        s: (1.0 - tp[s] / eo[s]) if eo[s] > 0 else None for s in SPECIES
    }
    return {
        "planner": case.planner,
        "controller": case.controller,
        "v0_mps": case.v0_mps,
        "fuel_g": case.fuel_total_g,
        "delta_soc": case.delta_soc,
        "equivalent_energy_kwh": equivalent_energy(
            case.fuel_total_g, case.delta_soc, factors
        ),
        "distance_m": case.profile.total_distance,
        "duration_s": case.profile.duration,
        "engine_on_s": sum(1 for d in case.decisions if d.e_mode == 2),
        "stopped_s": int(np.sum(case.profile.speeds < 0.01)),
        "mean_t_cl_c": float(np.mean(case.t_cl_c)),
        "mean_t_cat_c": float(np.mean(case.t_cat_c)),
        "final_t_cl_c": float(case.t_cl_c[-1]),
        "final_t_cat_c": float(case.t_cat_c[-1]),
        "t_cat_200_s": _first_time_at(case.t_cat_c, 200.0),
        "engine_out_g": eo,
        "tailpipe_g": tp,
        "conversion": conversion,
        "soc_saturation_steps": case.soc_saturation_steps,
    }


# ---------------------------------------------------------------------------
# batches

@dataclass
class BatchResult:
    scenario: Scenario
    seed: int
    n: int
    t_cat0_c: float
    v0_mps: np.ndarray
    cases: dict[str, list[CaseResult | None]]
    failures: list[dict]


def run_batch(
    scenario: Scenario,
    *,
    n: int | None = None,
    seed: int | None = None,
    t_cat0_c: float | None = None,
) -> BatchResult:
    """Run the four-way comparison for a seeded fleet.

    Each vehicle's initial speed is drawn once and shared by all four
    combinations; each planner's trip is planned once and shared by
    both controllers.  Case failures are recorded and the batch
    continues.
    """
    sim = scenario.sim
    n = sim.n_vehicles if n is None else int(n)
    if n < 0:
        raise ValueError("vehicle count cannot be negative")
    seed = sim.seed if seed is None else int(seed)
    t_cat0 = sim.t_cat0_c if t_cat0_c is None else float(t_cat0_c)
    rng = np.random.default_rng(seed)
    v0s = rng.uniform(sim.v0_min_kmh, sim.v0_max_kmh, n) / 3.6

    cases: dict[str, list[CaseResult | None]] = {
        combo_key(p, c): [] for p, c in COMBOS
    }
    failures: list[dict] = []
    for i in range(n):
        v0 = float(v0s[i])
        trips: dict[str, TripPlan | Exception] = {}
        for planner in ("baseline", "eco"):
            try:
                trips[planner] = plan_trip(scenario, v0, planner)
            except Exception as exc:   # recorded, batch continues
                trips[planner] = exc
        for planner, controller in COMBOS:
            key = combo_key(planner, controller)
            trip = trips[planner]
            if isinstance(trip, Exception):
                failures.append(
                    {
                        "vehicle": i,
                        "planner": planner,
                        "controller": controller,
                        "stage": "plan",
                        "error": f"{type(trip).__name__}: {trip}",
                    }
                )
                cases[key].append(None)
                continue
            try:
                cases[key].append(
                    run_case(
                        scenario,
                        planner=planner,
                        controller=controller,
                        v0_mps=v0,
                        t_cat0_c=t_cat0,
                        trip=trip,
                    )
                )
            except Exception as exc:   # recorded, batch continues
                failures.append(
                    {
                        "vehicle": i,
                        "planner": planner,
                        "controller": controller,
                        "stage": "simulate",
                        "error": f"{type(exc).__name__}: {exc}",
                    }
                )
                cases[key].append(None)
    return BatchResult(
        scenario=scenario,
        seed=seed,
        n=n,
        t_cat0_c=t_cat0,
        v0_mps=v0s,
        cases=cases,
        failures=failures,
    )


_MEAN_METRICS = (
    "fuel_g",
    "delta_soc",
    "equivalent_energy_kwh",
    "duration_s",
    "engine_on_s",
    "stopped_s",
    "mean_t_cl_c",
    "mean_t_cat_c",
    "final_t_cl_c",
    "final_t_cat_c",
    "soc_saturation_steps",
)


def combo_means(batch: BatchResult) -> dict:
    """Per-combination means of the scalar case metrics.

    ``t_cat_200_s`` averages the first time the catalyst reaches
    200 degC, counting never-reached cases at trip duration (a floor on
    the true value); the count of cases that reached it is reported
    alongside.
    """
    out: dict[str, dict] = {}
    for key, lst in batch.cases.items():
        done = [c for c in lst if c is not None]
        if not done:
            out[key] = {"n": 0}
            continue
        m: dict = {"n": len(done)}
        for name in _MEAN_METRICS:
            m[name] = float(np.mean([c.summary[name] for c in done]))
        reach = [
            c.summary["t_cat_200_s"]
            if c.summary["t_cat_200_s"] is not None
            else c.summary["duration_s"]
            for c in done
        ]
        m["t_cat_200_s"] = float(np.mean(reach))
        m["t_cat_200_reached_n"] = sum(
            1 for c in done if c.summary["t_cat_200_s"] is not None
        )
        for group in ("engine_out_g", "tailpipe_g"):
            for s in SPECIES:
                m[f"{group[:-2]}_{s}_g"] = float(
                    np.mean([c.summary[group][s] for c in done])
                )
        for s in SPECIES:
            vals = [
                c.summary["conversion"][s]
                for c in done
                if c.summary["conversion"][s] is not None
            ]
            m[f"conversion_{s}"] = float(np.mean(vals)) if vals else None
        out[key] = m
    return out


def improvement_indices(
    batch: BatchResult,
    test: tuple[str, str] = ("eco", "dp"),
    base: tuple[str, str] = ("baseline", "rule"),
) -> dict:
    """Per-case and mean percentage improvements of test over base.

    Energy and fuel compare case totals; species compare cumulative
    tailpipe grams.  Zero-baseline cases are excluded from the means
    and counted.
    """
    test_cases = batch.cases[combo_key(*test)]
    base_cases = batch.cases[combo_key(*base)]
    out: dict = {"test": combo_key(*test), "base": combo_key(*base)}

    def collect(metric_name, getter):
        per: list[float | None] = []
        excluded = 0
        for t_case, b_case in zip(test_cases, base_cases):
            if t_case is None or b_case is None:
                per.append(None)
                continue
            zb, zt = getter(b_case), getter(t_case)
            try:
                per.append(emission_improvement(zb, zt))
            except ZeroBaseline:
                per.append(None)
                excluded += 1
        values = [x for x in per if x is not None]
        out[metric_name] = {
            "per_case": per,
            "mean": float(np.mean(values)) if values else None,
            "excluded": excluded,
        }

    collect("equivalent_energy_pct", lambda c: c.summary["equivalent_energy_kwh"])
    collect("fuel_pct", lambda c: c.summary["fuel_g"])
    for s in SPECIES:
        collect(f"{s}_pct", lambda c, s=s: c.summary["tailpipe_g"][s])
    return out


# ---------------------------------------------------------------------------
# export

def _fmt(x: float) -> str:
    return format(float(x), ".10g")


def _trace_name(vehicle: int | None, planner: str, controller: str) -> str:
    if vehicle is None:
        return f"trace_{planner}_{controller}.csv"
    return f"trace_v{vehicle:03d}_{planner}_{controller}.csv"


def write_case_csv(case: CaseResult, path: Path) -> None:
    """One row per second; step quantities are zero on the final sample."""
    steps = len(case.fuel_g_s)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for k in range(len(case.profile.speeds)):
            if k < steps:
                dec = case.decisions[k]
                e_mode, p_bat, p_eng = dec.e_mode, dec.p_bat_w, dec.p_eng_w
                eo = case.engine_out_g_s[k]
                tp = case.tailpipe_g_s[k]
            else:
                e_mode, p_bat, p_eng = 1, 0.0, 0.0
                eo = tp = np.zeros(len(SPECIES))
            w.writerow(
                [
                    _fmt(case.profile.t0 + k),
                    _fmt(case.profile.speeds[k]),
                    case.profile.modes[k].value,
                    _fmt(case.p_trac_w[k]),
                    str(e_mode),
                    _fmt(p_bat),
                    _fmt(p_eng),
                    _fmt(case.soc[k]),
                    _fmt(case.t_cl_c[k]),
                    _fmt(case.t_cat_c[k]),
                    *(_fmt(x) for x in eo),
                    *(_fmt(x) for x in tp),
                ]
            )


def case_summary_dict(case: CaseResult, scenario: Scenario) -> dict:
    return {
        "schema_version": SUMMARY_SCHEMA_VERSION,
        "kind": "case",
        "scenario_digest": config_digest(scenario),
        **case.summary,
    }


def batch_summary_dict(batch: BatchResult) -> dict:
    cases = []
    for planner, controller in COMBOS:
        key = combo_key(planner, controller)
        for i, case in enumerate(batch.cases[key]):
            if case is None:
                continue
            cases.append(
                {
                    "vehicle": i,
                    "trace_file": _trace_name(i, planner, controller),
                    **case.summary,
                }
            )
    return {
        "schema_version": SUMMARY_SCHEMA_VERSION,
        "kind": "batch",
        "scenario_digest": config_digest(batch.scenario),
        "seed": batch.seed,
        "n_vehicles": batch.n,
        "t_cat0_c": batch.t_cat0_c,
        "v0_mps": [float(v) for v in batch.v0_mps],
        "combos": [combo_key(p, c) for p, c in COMBOS],
        "cases": cases,
        "failures": batch.failures,
        "n_failures": len(batch.failures),
        "means": combo_means(batch),
        "improvement": {
            "eco_dp_vs_baseline_rule": improvement_indices(
                batch, ("eco", "dp"), ("baseline", "rule")
            ),
            "eco_rule_vs_baseline_rule": improvement_indices(
                batch, ("eco", "rule"), ("baseline", "rule")
            ),
            "eco_dp_vs_eco_rule": improvement_indices(
                batch, ("eco", "dp"), ("eco", "rule")
            ),
        },
    }


def _write_json(doc: dict, path: Path) -> None:
    path.write_text(json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n")


def export(
    result: CaseResult | BatchResult,
    out_dir: str | Path,
    *,
    scenario: Scenario | None = None,
    formats: tuple[str, ...] = ("csv", "json"),
) -> list[Path]:
    """Write time-series CSVs and the summary JSON; returns written paths.

    For a single case a ``scenario`` is required for the digest; for a
    batch it is carried by the result.  An empty batch still produces
    the index CSV (headers only) and a valid summary.
    """
    for f in formats:
        if f not in ("csv", "json"):
            raise ValueError(f"unknown export format: {f}")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written: list[Path] = []

    if isinstance(result, CaseResult):
        if scenario is None:
            raise ValueError("exporting a single case needs the scenario")
        if "csv" in formats:
            p = out / _trace_name(None, result.planner, result.controller)
            write_case_csv(result, p)
            written.append(p)
        if "json" in formats:
            p = out / "summary.json"
            _write_json(case_summary_dict(result, scenario), p)
            written.append(p)
        return written

    if "csv" in formats:
        index_path = out / "cases_index.csv"
        with index_path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(INDEX_HEADER)
            for planner, controller in COMBOS:
                for i, case in enumerate(result.cases[combo_key(planner, controller)]):
                    if case is None:
                        continue
                    trace = _trace_name(i, planner, controller)
                    w.writerow(
                        [
                            str(i),
                            planner,
                            controller,
                            _fmt(case.v0_mps),
                            _fmt(case.summary["fuel_g"]),
                            _fmt(case.summary["delta_soc"]),
                            _fmt(case.summary["equivalent_energy_kwh"]),
                            _fmt(case.summary["duration_s"]),
                            trace,
                        ]
                    )
        written.append(index_path)
        for planner, controller in COMBOS:
            for i, case in enumerate(result.cases[combo_key(planner, controller)]):
                if case is None:
                    continue
                p = out / _trace_name(i, planner, controller)
                write_case_csv(case, p)
                written.append(p)
    if "json" in formats:
        p = out / "summary.json"
        _write_json(batch_summary_dict(result), p)
        written.append(p)
    return written
