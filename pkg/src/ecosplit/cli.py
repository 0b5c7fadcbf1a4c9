"""Command line front end.

Subcommands: ``run`` one case, ``batch`` a seeded fleet over all four
planner/controller combinations, ``compare`` two exported summary files
into an improvement table, ``dump-maps`` the static maps for
inspection.  Exit codes: 0 success, 1 at least one case failed, 2
configuration error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .config import Scenario, load_scenario
from .errors import ConfigError, ZeroBaseline
from .harness import (
    COMBOS,
    combo_key,
    combo_means,
    emission_improvement,
    export,
    improvement_indices,
    run_batch,
    run_case,
)
from .tables import bilinear
from .thermal import SPECIES, conversion_efficiency


def _load(path: str | None) -> Scenario:
    return load_scenario(path)


def _print_case(summary: dict) -> None:
    print(f"planner={summary['planner']} controller={summary['controller']}")
    print(f"  distance        {summary['distance_m']:.1f} m in {summary['duration_s']:.0f} s")
    print(f"  fuel            {summary['fuel_g']:.2f} g")
    print(f"  delta SOC       {summary['delta_soc']:+.4f}")
    print(f"  equiv. energy   {summary['equivalent_energy_kwh']:.4f} kWh")
    print(f"  mean T_cl/T_cat {summary['mean_t_cl_c']:.1f} / {summary['mean_t_cat_c']:.1f} degC")
    tp = summary["tailpipe_g"]
    print(
        "  tailpipe        "
        + "  ".join(f"{s.upper()} {tp[s] * 1000:.2f} mg" for s in SPECIES)
    )


def _cmd_run(args: argparse.Namespace) -> int:
    scenario = _load(args.scenario)
    result = run_case(
        scenario,
        planner=args.planner,
        controller=args.controller,
        t_cat0_c=args.tcat0,
    )
    _print_case(result.summary)
    if args.out:
        paths = export(result, args.out, scenario=scenario)
        for p in paths:
            print(f"wrote {p}")
    return 0


def _cmd_batch(args: argparse.Namespace) -> int:
    scenario = _load(args.scenario)
    batch = run_batch(scenario, n=args.n, seed=args.seed, t_cat0_c=args.tcat0)
    means = combo_means(batch)
    print(f"{'combo':<14}{'n':>4}{'fuel g':>10}{'dSOC':>9}{'eq kWh':>9}{'T_cat':>8}")
    for planner, controller in COMBOS:
        key = combo_key(planner, controller)
        m = means[key]
        if m["n"] == 0:
            print(f"{key:<14}{0:>4}")
            continue
        print(
            f"{key:<14}{m['n']:>4}{m['fuel_g']:>10.2f}{m['delta_soc']:>9.4f}"
            f"{m['equivalent_energy_kwh']:>9.4f}{m['mean_t_cat_c']:>8.1f}"
        )
    imp = improvement_indices(batch)
    if imp["equivalent_energy_pct"]["mean"] is not None:
        print(
            f"eco_dp vs baseline_rule: "
            f"energy {imp['equivalent_energy_pct']['mean']:+.1f}%  "
            + "  ".join(
                f"{s.upper()} {imp[f'{s}_pct']['mean']:+.1f}%"
                for s in SPECIES
                if imp[f"{s}_pct"]["mean"] is not None
            )
        )
    if args.out:
        paths = export(batch, args.out)
        print(f"wrote {len(paths)} files to {args.out}")
    if batch.failures:
        print(f"{len(batch.failures)} case(s) failed", file=sys.stderr)
        return 1
    return 0


_COMPARE_METRICS = (
    ("fuel_g", "fuel g"),
    ("equivalent_energy_kwh", "equiv kWh"),
)


def _compare_rows(base: dict, test: dict) -> list[tuple[str, float, float, float | None]]:
    rows = []
    for key, label in _COMPARE_METRICS:
        zb, zt = base.get(key), test.get(key)
        if zb is None or zt is None:
            continue
        try:
            rows.append((label, zb, zt, emission_improvement(zb, zt)))
        except ZeroBaseline:
            rows.append((label, zb, zt, None))
    for s in SPECIES:
        if "tailpipe_g" in base:
            zb, zt = base["tailpipe_g"][s], test["tailpipe_g"][s]
        else:
            zb, zt = base.get(f"tailpipe_{s}_g"), test.get(f"tailpipe_{s}_g")
        if zb is None or zt is None:
            continue
        try:
            rows.append((f"tailpipe {s}", zb, zt, emission_improvement(zb, zt)))
        except ZeroBaseline:
            rows.append((f"tailpipe {s}", zb, zt, None))
    return rows


def _print_table(rows: list[tuple[str, float, float, float | None]]) -> None:
    print(f"{'metric':<14}{'base':>12}{'test':>12}{'improve':>10}")
    for label, zb, zt, pct in rows:
        tail = f"{pct:>+9.1f}%" if pct is not None else f"{'n/a':>10}"
        print(f"{label:<14}{zb:>12.4g}{zt:>12.4g}{tail}")


def _cmd_compare(args: argparse.Namespace) -> int:
    docs = []
    for path in (args.base, args.test):
        try:
            docs.append(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read summary {path}: {exc}") from exc
    base, test = docs
    kinds = (base.get("kind"), test.get("kind"))
    if kinds[0] != kinds[1] or kinds[0] not in ("case", "batch"):
        raise ConfigError(f"cannot compare summaries of kinds {kinds[0]!r} and {kinds[1]!r}")
    if kinds[0] == "case":
        _print_table(_compare_rows(base, test))
        return 0
    shared = [
        key
        for key in base.get("means", {})
        if key in test.get("means", {})
        and base["means"][key].get("n", 0) > 0
        and test["means"][key].get("n", 0) > 0
    ]
    if not shared:
        raise ConfigError("no combination present in both batch summaries")
    for key in shared:
        print(f"[{key}]")
        _print_table(_compare_rows(base["means"][key], test["means"][key]))
    return 0


def _cmd_dump_maps(args: argparse.Namespace) -> int:
    scenario = _load(args.scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fuel = scenario.powertrain().fuel_map
    maps = scenario.emission_maps()

    path = out / "engine_maps.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["omega_rad_s", "p_eng_w", "fuel_g_s", "hc_g_s", "co_g_s", "nox_g_s"])
        for om in fuel.x:
            for p in fuel.y:
                w.writerow(
                    [
                        f"{om:.10g}",
                        f"{p:.10g}",
                        f"{bilinear(fuel, om, p):.10g}",
                        f"{bilinear(maps.hc, om, p):.10g}",
                        f"{bilinear(maps.co, om, p):.10g}",
                        f"{bilinear(maps.nox, om, p):.10g}",
                    ]
                )
    print(f"wrote {path}")

    path = out / "operating_line.csv"
    ool = scenario.powertrain().operating_line
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p_eng_w", "omega_rad_s"])
        for p, om in zip(ool.power_w, ool.omega_rad_s):
            w.writerow([f"{p:.10g}", f"{om:.10g}"])
    print(f"wrote {path}")

    path = out / "light_off.csv"
    temps = np.arange(0.0, 501.0, 5.0)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t_cat_c"] + [f"eta_{s}" for s in SPECIES])
        for t in temps:
            row = [f"{t:.10g}"]
            for s in SPECIES:
                row.append(f"{conversion_efficiency(t, scenario.curves.for_species(s)):.10g}")
            w.writerow(row)
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecosplit",
        description="Eco-driving and power-split simulation for a signalized corridor.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a single case")
    run.add_argument("--scenario", help="scenario YAML (default: built-in)")
    run.add_argument("--out", help="output directory for trace and summary")
    run.add_argument("--planner", choices=["baseline", "eco"])
    run.add_argument("--controller", choices=["rule", "dp"])
    run.add_argument("--tcat0", type=float, help="initial catalyst temperature, degC")
    run.set_defaults(func=_cmd_run)

    batch = sub.add_parser("batch", help="simulate a seeded fleet, all combinations")
    batch.add_argument("--scenario", help="scenario YAML (default: built-in)")
    batch.add_argument("--out", help="output directory for traces and summary")
    batch.add_argument("--seed", type=int, help="fleet RNG seed")
    batch.add_argument("--n", type=int, help="number of vehicles")
    batch.add_argument("--tcat0", type=float, help="initial catalyst temperature, degC")
    batch.set_defaults(func=_cmd_batch)

    cmp_ = sub.add_parser("compare", help="improvement table from two summary files")
    cmp_.add_argument("base", help="summary JSON of the reference result")
    cmp_.add_argument("test", help="summary JSON of the candidate result")
    cmp_.set_defaults(func=_cmd_compare)

    dump = sub.add_parser("dump-maps", help="write engine maps and curves as CSV")
    dump.add_argument("--scenario", help="scenario YAML (default: built-in)")
    dump.add_argument("--out", default="maps", help="output directory (default: maps)")
    dump.set_defaults(func=_cmd_dump_maps)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:   # a failed case, not a usage problem
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
