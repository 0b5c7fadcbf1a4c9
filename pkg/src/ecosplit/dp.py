"""Backward dynamic programming for the engine/battery power split.

State is SOC on a fixed grid, control is (engine mode, battery power),
cost is fuel over the horizon plus a quadratic terminal penalty pulling
the final SOC to a target.  The SOC increment does not depend on the
SOC level itself, so the one-step transition structure is precomputed
and each backward sweep reduces to interpolations of the value
function.  The forward pass re-optimizes at the exact (off-grid) state,
re-simulating the chosen controls so the reported trace obeys the step
dynamics exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoFeasiblePolicy
from .powertrain import (
    ENGINE_OFF_OP,
    ControlDecision,
    EngineOp,
    PowertrainConfig,
    engine_op_for,
    soc_increment,
)
from .tables import bilinear


@dataclass(frozen=True)
class TerminalCost:
    """Quadratic penalty, in grams of fuel per squared SOC deviation."""

    target_soc: float
    weight: float

    def __post_init__(self) -> None:
        if self.weight < 0:
            raise ValueError("terminal weight must be non-negative")

    def cost(self, soc):
        d = np.asarray(soc, dtype=float) - self.target_soc
        return self.weight * d * d


@dataclass
class DpProblem:
    """One optimization instance over a fixed 1 Hz demand trace."""

    demand_w: np.ndarray
    p_aux_w: float
    soc0: float
    soc_grid: np.ndarray
    p_bat_grid: np.ndarray
    terminal: TerminalCost
    powertrain: PowertrainConfig
    ac_on: bool = True

    def __post_init__(self) -> None:
        self.demand_w = np.asarray(self.demand_w, dtype=float)
        self.soc_grid = np.asarray(self.soc_grid, dtype=float)
        self.p_bat_grid = np.asarray(self.p_bat_grid, dtype=float)
        if self.demand_w.ndim != 1 or len(self.demand_w) == 0:
            raise ValueError("demand trace must be a non-empty 1-D array")
        if len(self.soc_grid) < 2 or np.any(np.diff(self.soc_grid) <= 0):
            raise ValueError("SOC grid must be strictly increasing with >= 2 points")
        if np.any(np.diff(self.p_bat_grid) <= 0):
            raise ValueError("battery power grid must be strictly increasing")
        soc = self.powertrain.soc_model
        if not soc.soc_min - 1e-12 <= self.soc_grid[0] <= self.soc_grid[-1] <= soc.soc_max + 1e-12:
            raise ValueError("SOC grid must lie inside the SOC bounds")
        if not self.soc_grid[0] - 1e-12 <= self.soc0 <= self.soc_grid[-1] + 1e-12:
            raise ValueError("initial SOC must lie inside the grid span")
        bat = self.powertrain.battery
        if self.p_bat_grid[0] < bat.p_min_w - 1e-6 or self.p_bat_grid[-1] > bat.p_max_w + 1e-6:
            raise ValueError("battery power grid must honor the battery envelope")
        if self.p_aux_w < 0:
            raise ValueError("auxiliary power must be non-negative")

    @property
    def horizon(self) -> int:
        return len(self.demand_w)


@dataclass
class DpSolution:
    decisions: list[ControlDecision]
    engine_ops: list[EngineOp]
    soc_trace: np.ndarray
    fuel_trace: np.ndarray
    value: float
    terminal_cost: float
    target_soc: float

    @property
    def fuel_total_g(self) -> float:
        return float(np.sum(self.fuel_trace))

    @property
    def delta_soc(self) -> float:
        return float(self.soc_trace[-1] - self.soc_trace[0])


@dataclass
class _Transitions:
    """Problem structure that does not depend on the SOC level."""

    dsoc_on: np.ndarray      # per engine-on candidate
    p_eng_on: np.ndarray     # (K, nc)
    valid_on: np.ndarray     # (K, nc) bool
    fuel_on: np.ndarray      # (K, nc), +inf where invalid
    omega_on: np.ndarray     # (K, nc)
    p_off: np.ndarray        # (K,) battery power of the all-electric control
    valid_off: np.ndarray    # (K,) bool
    dsoc_off: np.ndarray     # (K,)
    pref_order: np.ndarray   # candidate indices, smaller |p_bat| first


def _precompute(problem: DpProblem) -> _Transitions:
    cfg = problem.powertrain
    soc = cfg.soc_model
    bat = cfg.battery
    demand = problem.demand_w
    pbat = problem.p_bat_grid
    aux = problem.p_aux_w

    dsoc_on = np.array(
        [soc_increment(p - aux, aux, problem.ac_on, soc) for p in pbat]
    )
    p_eng = demand[:, None] + aux - pbat[None, :]
    valid_on = (p_eng > 0.0) & (p_eng <= cfg.p_eng_max + 1e-9)
    safe_p = np.clip(p_eng, cfg.operating_line.power_w[0] + 1e-9, cfg.p_eng_max)
    omega = np.interp(safe_p, cfg.operating_line.power_w, cfg.operating_line.omega_rad_s)
    omega_cl = np.clip(omega, cfg.fuel_map.x[0], cfg.fuel_map.x[-1])
    fuel = np.asarray(bilinear(cfg.fuel_map, omega_cl, np.clip(safe_p, None, cfg.fuel_map.y[-1])))
    fuel = np.where(valid_on, fuel, np.inf)

    p_off = demand + aux
    valid_off = (p_off >= bat.p_min_w - 1e-9) & (p_off <= bat.p_max_w + 1e-9)
    dsoc_off = np.array(
        [soc_increment(d, aux, problem.ac_on, soc) for d in demand]
    )
    pref = np.lexsort((pbat, np.abs(pbat)))
    return _Transitions(dsoc_on, p_eng, valid_on, fuel, omega, p_off, valid_off, dsoc_off, pref)


def feasible_controls(
    k: int, soc: float, problem: DpProblem
) -> list[tuple[ControlDecision, EngineOp]]:
    """Admissible controls at step k from the given SOC, preference first.

    Engine-off is a single control whose battery power equals the full
    electric demand; engine-on candidates take battery power from the
    grid with the engine covering the remainder.  Transitions that
    would saturate the SOC bounds or leave the grid span are dropped.
    """
    cfg = problem.powertrain
    soc_model = cfg.soc_model
    bat = cfg.battery
    demand = float(problem.demand_w[k])
    aux = problem.p_aux_w
    out: list[tuple[ControlDecision, EngineOp]] = []

    def admissible(p_mg: float) -> bool:
        nxt = soc + soc_increment(p_mg, aux, problem.ac_on, soc_model)
        if nxt < soc_model.soc_min or nxt > soc_model.soc_max:
            return False
        return problem.soc_grid[0] <= nxt <= problem.soc_grid[-1]

    p_off = demand + aux
    if bat.p_min_w - 1e-9 <= p_off <= bat.p_max_w + 1e-9 and admissible(demand):
        out.append((ControlDecision(1, p_off, demand, 0.0), ENGINE_OFF_OP))
    order = np.lexsort((problem.p_bat_grid, np.abs(problem.p_bat_grid)))
    for j in order:
        p_bat = float(problem.p_bat_grid[j])
        p_eng = demand + aux - p_bat
        if p_eng <= 0.0 or p_eng > cfg.p_eng_max + 1e-9:
            continue
        if not admissible(p_bat - aux):
            continue
        op = engine_op_for(p_eng, cfg)
        out.append((ControlDecision(2, p_bat, p_bat - aux, p_eng), op))
    return out


def solve(problem: DpProblem) -> DpSolution:
    """Backward value iteration plus an exact forward re-simulation.

    Continuation values are linear interpolations on the SOC grid and
    +inf outside its span; transitions that saturate the SOC bounds are
    infeasible.  Ties prefer engine-off, then the smaller battery-power
    magnitude.  The reported value is the fuel sum of the re-simulated
    trace plus the terminal cost of its final SOC.
    """
    tr = _precompute(problem)
    grid = problem.soc_grid
    soc_model = problem.powertrain.soc_model
    K = problem.horizon
    nc = len(problem.p_bat_grid)

    nxt_on = grid[None, :] + tr.dsoc_on[:, None]
    bad_on = (
        (nxt_on < soc_model.soc_min)
        | (nxt_on > soc_model.soc_max)
        | (nxt_on < grid[0])
        | (nxt_on > grid[-1])
    )
    values: list[np.ndarray] = [np.empty(0)] * (K + 1)
    values[K] = np.asarray(problem.terminal.cost(grid), dtype=float)
    for k in range(K - 1, -1, -1):
        v_next = values[k + 1]
        cont = np.interp(nxt_on.ravel(), grid, v_next).reshape(nc, len(grid))
        cont[bad_on] = np.inf
        best = np.min(tr.fuel_on[k][:, None] + cont, axis=0) if nc else np.full(len(grid), np.inf)
        if tr.valid_off[k]:
            nxt_off = grid + tr.dsoc_off[k]
            cont_off = np.interp(nxt_off, grid, v_next)
            cont_off[
                (nxt_off < soc_model.soc_min)
                | (nxt_off > soc_model.soc_max)
                | (nxt_off < grid[0])
                | (nxt_off > grid[-1])
            ] = np.inf
            best = np.minimum(best, cont_off)
        values[k] = best

    # forward: evaluate candidates at the exact state, preferring
    # engine-off and then smaller |p_bat| on exact cost ties
    x = float(problem.soc0)
    decisions: list[ControlDecision] = []
    ops: list[EngineOp] = []
    soc_trace = np.empty(K + 1)
    fuel_trace = np.empty(K)
    soc_trace[0] = x
    for k in range(K):
        v_next = values[k + 1]
        best_cost = math.inf
        best = None
        if tr.valid_off[k]:
            nxt = x + tr.dsoc_off[k]
            if (
                soc_model.soc_min <= nxt <= soc_model.soc_max
                and grid[0] <= nxt <= grid[-1]
            ):
                best_cost = float(np.interp(nxt, grid, v_next))
                best = (1, float(tr.p_off[k]), 0.0, 0.0, nxt)
        for j in tr.pref_order:
            if not tr.valid_on[k, j]:
                continue
            nxt = x + tr.dsoc_on[j]
            if not (soc_model.soc_min <= nxt <= soc_model.soc_max):
                continue
            if not (grid[0] <= nxt <= grid[-1]):
                continue
            c = tr.fuel_on[k, j] + float(np.interp(nxt, grid, v_next))
            if c < best_cost:
                best_cost = c
                best = (
                    2,
                    float(problem.p_bat_grid[j]),
                    float(tr.p_eng_on[k, j]),
                    float(tr.fuel_on[k, j]),
                    nxt,
                )
        if best is None:
            raise NoFeasiblePolicy(f"no admissible control at step {k}")
        e_mode, p_bat, p_eng, fuel, x = best
        decisions.append(ControlDecision(e_mode, p_bat, p_bat - problem.p_aux_w, p_eng))
        if e_mode == 1:
            ops.append(ENGINE_OFF_OP)
        else:
            j = int(np.argwhere(problem.p_bat_grid == p_bat)[0][0])
            ops.append(EngineOp(float(tr.omega_on[k, j]), p_eng, fuel))
        fuel_trace[k] = fuel
        soc_trace[k + 1] = x

    terminal_cost = float(problem.terminal.cost(x))
    value = float(np.sum(fuel_trace) + terminal_cost)
    return DpSolution(
        decisions=decisions,
        engine_ops=ops,
        soc_trace=soc_trace,
        fuel_trace=fuel_trace,
        value=value,
        terminal_cost=terminal_cost,
        target_soc=problem.terminal.target_soc,
    )


def charge_sustain_check(solution: DpSolution, band: float) -> bool:
    """True when the final SOC lies within ``band`` of the terminal target."""
    if band < 0:
        raise ValueError("band must be non-negative")
    return abs(float(solution.soc_trace[-1]) - solution.target_soc) <= band
