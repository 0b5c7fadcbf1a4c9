"""Signal timing, queue buildup, and the usable share of each green.

A fixed-time signal alternates green and red; vehicles that arrive on
red stack up and have to discharge at the saturation flow before a
newly arriving car can pass.  The usable "green window" is therefore
narrower than the raw green interval, and the difference grows with
the standing queue.
"""
import argparse

import numpy as np

from ecosplit.config import default_corridor
from ecosplit.traffic import evolve_queue, predict_green_window

WARMUP_S = 150


def phase_strip(signal, t0: float, seconds: int, step: int = 5) -> str:
    return "".join(
        "G" if signal.is_green(t0 + k) else "." for k in range(0, seconds, step)
    )


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--plot", metavar="PNG", help="save the queue trace as a figure")
    args = ap.parse_args()

    corridor = default_corridor()
    inter = corridor.intersections[0]
    sig = inter.signal
    onset, end = sig.green_interval(2)

    print(f"intersection at {inter.position_m:.0f} m")
    print(
        f"  cycle {sig.cycle_length:.0f} s, green [{onset:.0f}, {end:.0f}) s, "
        f"arrivals {inter.arrival_rate_vph:.0f} veh/h, "
        f"saturation {inter.saturation_flow_vph:.0f} veh/h"
    )
    print(f"  phase strip (5 s cells, two cycles from t=0): {phase_strip(sig, 0.0, 150)}")
    print()

    arrivals = np.full(WARMUP_S, inter.lane_arrival_rate_vph)
    trace = evolve_queue(
        sig, arrivals, inter.saturation_flow_vph, onset - WARMUP_S, WARMUP_S,
        jam_density=inter.jam_density_vpkm,
    )
    print(f"queue over the {WARMUP_S} s before the cycle-2 green onset:")
    for k in range(0, WARMUP_S + 1, 25):
        t = onset - WARMUP_S + k
        state = "green" if sig.is_green(t) else "red"
        print(
            f"  t={t:6.0f} s  {state:<5}  queue {trace[k].queue_length:5.2f} veh  "
            f"tail {trace[k].queue_tail_position:6.1f} m upstream"
        )
    standing = trace[-1]
    print(f"standing queue at the onset: {standing.queue_length:.2f} vehicles")
    print()

    print("usable window per cycle (standing queue discharges first):")
    print(f"  {'cycle':>5} {'green':>16} {'usable':>18} {'lost':>7}")
    for cycle in range(2, 6):
        g0, g1 = sig.green_interval(cycle)
        w = predict_green_window(
            sig, standing, inter.saturation_flow_vph, cycle
        )
        lost = w.earliest_pass - g0
        print(
            f"  {cycle:>5} [{g0:6.0f}, {g1:6.0f}) "
            f"[{w.earliest_pass:7.1f}, {w.latest_pass:6.0f}) {lost:6.1f} s"
        )
    print()

    lost_time = 2.0
    w0 = predict_green_window(sig, standing, inter.saturation_flow_vph, 2)
    w2 = predict_green_window(
        sig, standing, inter.saturation_flow_vph, 2, startup_lost_time=lost_time
    )
    print(
        f"with {lost_time:.0f} s startup lost time the cycle-2 window opens at "
        f"{w2.earliest_pass:.1f} s instead of {w0.earliest_pass:.1f} s"
    )

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        ts = np.arange(WARMUP_S + 1) + (onset - WARMUP_S)
        fig, ax = plt.subplots(figsize=(8, 3.2))
        ax.plot(ts, [s.queue_length for s in trace], lw=1.5)
        for c in range(sig.cycle_index(ts[0]), sig.cycle_index(ts[-1]) + 1):
            g0, g1 = sig.green_interval(c)
            ax.axvspan(g0, g1, color="tab:green", alpha=0.15, lw=0)
        ax.set_xlim(ts[0], ts[-1])
        ax.set_xlabel("time [s]")
        ax.set_ylabel("queue [veh]")
        ax.set_title(f"queue at {inter.position_m:.0f} m (green bands shaded)")
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)
        print(f"wrote {args.plot}")


if __name__ == "__main__":
    main()
