"""Rule-based versus optimized engine/battery split on one eco trip.

Both controllers serve the same planned speed profile, so every
difference below comes from when the engine runs and how hard.  The
optimizer sweeps the whole trip backward over a state-of-charge grid
and picks the split with the least total fuel that still returns the
battery to its starting charge.
"""
import argparse

import numpy as np

from ecosplit.config import default_scenario
from ecosplit.harness import energy_factors, equivalent_energy, plan_trip, run_case

V0_MPS = 53.0 / 3.6


def starts(decisions) -> int:
    return sum(
        1
        for k, d in enumerate(decisions)
        if d.e_mode == 2 and (k == 0 or decisions[k - 1].e_mode == 1)
    )


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--plot", metavar="PNG", help="save SOC and engine traces")
    args = ap.parse_args()

    scenario = default_scenario()
    trip = plan_trip(scenario, V0_MPS, "eco")
    cases = {
        name: run_case(
            scenario, planner="eco", controller=name, v0_mps=V0_MPS, trip=trip
        )
        for name in ("rule", "dp")
    }

    print(f"one eco trip, {trip.profile.duration:.0f} s, two controllers:")
    print(
        f"  {'controller':<11}{'fuel g':>8}{'dSOC':>9}{'eq kWh':>9}"
        f"{'engine on':>11}{'starts':>8}{'SOC range':>16}"
    )
    for name, case in cases.items():
        s = case.summary
        print(
            f"  {name:<11}{s['fuel_g']:>8.2f}{s['delta_soc']:>+9.4f}"
            f"{s['equivalent_energy_kwh']:>9.4f}{s['engine_on_s']:>9d} s"
            f"{starts(case.decisions):>8}"
            f"   [{case.soc.min():.3f}, {case.soc.max():.3f}]"
        )
    factors = energy_factors(scenario)
    gap = cases["rule"].summary["equivalent_energy_kwh"] - cases[
        "dp"
    ].summary["equivalent_energy_kwh"]
    print(f"optimization saves {gap:.4f} kWh equivalent on this trip")
    print()

    dp = cases["dp"]
    k0 = int(np.argmax(dp.p_trac_w[: len(dp.decisions)]))
    lo, hi = max(0, k0 - 3), min(len(dp.decisions), k0 + 4)
    print(f"optimizer decisions around the demand peak (t={k0} s):")
    print(f"  {'t':>4} {'demand W':>9} {'p_eng W':>9} {'p_bat W':>9} {'SOC':>7}")
    for k in range(lo, hi):
        d = dp.decisions[k]
        print(
            f"  {k:>4} {dp.p_trac_w[k]:>9.0f} {d.p_eng_w:>9.0f} "
            f"{d.p_bat_w:>9.0f} {dp.soc[k]:>7.4f}"
        )
    print()
    hold = equivalent_energy(0.0, dp.summary["delta_soc"], factors)
    print(
        f"the optimizer ends {dp.summary['delta_soc']:+.4f} SOC "
        f"({hold:+.4f} kWh), inside the charge-sustaining band"
    )

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, axes = plt.subplots(2, 1, figsize=(9, 5), sharex=True)
        for name, case in cases.items():
            axes[0].plot(case.profile.times(), case.soc, lw=1.2, label=name)
            on = np.array([d.e_mode == 2 for d in case.decisions], dtype=float)
            axes[1].plot(
                case.profile.times()[:-1], np.where(on > 0, case_p_eng(case), np.nan),
                lw=1.0, label=name,
            )
        axes[0].axhline(scenario.sim.soc0, color="gray", ls=":", lw=0.8)
        axes[0].set_ylabel("SOC")
        axes[0].legend(loc="best")
        axes[1].set_ylabel("engine power [W]")
        axes[1].set_xlabel("time [s]")
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)
        print(f"wrote {args.plot}")


def case_p_eng(case) -> np.ndarray:
    return np.array([d.p_eng_w for d in case.decisions])


if __name__ == "__main__":
    main()
