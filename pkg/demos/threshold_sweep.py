"""Cooperation threshold of the framework game versus normalized synergy.

Sweeps eta = r / (<k> + 1) at two node speeds and prints the mean steady
cooperator fraction per grid point, plus the interpolated eta where each
curve crosses one half.  With --plot the curves go to threshold_sweep.png.

Usage:
    python3 demos/threshold_sweep.py [--reps 10] [--nodes 300] [--plot]
"""

import argparse

import numpy as np

from coopnet import parse_config, run_sweep
from coopnet.engine import steady_state_fraction

ETAS = [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]


def curve(nodes, velocity, reps, seed):
    spec = parse_config(
        {
            "scenario": "framework_pgg",
            "number_of_nodes": nodes,
            "eta": ETAS,
            "velocity": velocity,
            "max_slots": 1500,
            "replicates": reps,
            "seed": seed,
        }
    )
    sweep = run_sweep(spec)
    by_eta = {}
    for rec in sweep.records:
        by_eta.setdefault(rec.cell["eta"], []).append(steady_state_fraction(rec.result))
    return np.array([np.mean(by_eta[e]) for e in ETAS])


def half_crossing(means):
    for i, m in enumerate(means):
        if m >= 0.5:
            if i == 0:
                return ETAS[0]
            frac = (0.5 - means[i - 1]) / (m - means[i - 1])
            return ETAS[i - 1] + frac * (ETAS[i] - ETAS[i - 1])
    return float("inf")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=10)
    ap.add_argument("--nodes", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()

    curves = {}
    for v in (0.0, 15.0):
        curves[v] = curve(args.nodes, v, args.reps, args.seed)
        print(f"\nv = {v:g} m/slot")
        print("  eta   mean steady fc")
        for eta, fc in zip(ETAS, curves[v]):
            bar = "#" * int(round(40 * fc))
            print(f"  {eta:4.2f}  {fc:6.3f}  {bar}")
        print(f"  half-crossing at eta* = {half_crossing(curves[v]):.3f}")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        for v, fc in curves.items():
            plt.plot(ETAS, fc, marker="o", label=f"v = {v:g}")
        plt.axhline(0.5, color="gray", lw=0.5)
        plt.xlabel("eta = r / (<k> + 1)")
        plt.ylabel("steady cooperator fraction")
        plt.legend()
        plt.tight_layout()
        plt.savefig("threshold_sweep.png", dpi=150)
        print("\nwrote threshold_sweep.png")


if __name__ == "__main__":
    main()
