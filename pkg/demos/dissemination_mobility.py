"""Cooperator dynamics while packets spread: static versus mobile nodes.

Runs the packet-novelty game where payoffs come from fresh content only.
Prints, per speed, the transient peak of the cooperator fraction and the
long-run value, averaged over replicates.  The transient peak grows with
mobility (fresh neighbors carry fresh packets), but the novelty supply is
finite: once buffers saturate, cooperators earn the same pot shares as the
defectors next to them while still paying the transmission cost, a gap that
does not depend on the multiplier.  Long-run cooperation therefore collapses
at every speed, and static runs keep slightly more of it in isolated clumps
that mobility would break up.

Usage:
    python3 demos/dissemination_mobility.py [--eta 0.74] [--reps 10]
"""

import argparse

import numpy as np

from coopnet import parse_config, run_sweep
from coopnet.engine import steady_state_fraction


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eta", type=float, default=0.74)
    ap.add_argument("--reps", type=int, default=10)
    ap.add_argument("--nodes", type=int, default=300)
    ap.add_argument("--sources", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    spec = parse_config(
        {
            "scenario": "info_dissemination",
            "number_of_nodes": args.nodes,
            "number_of_sources": args.sources,
            "eta": [args.eta],
            "velocity": [0.0, 5.0, 10.0],
            "replicates": args.reps,
            "seed": args.seed,
        }
    )
    sweep = run_sweep(spec)

    by_v = {}
    for rec in sweep.records:
        by_v.setdefault(rec.cell["velocity"], []).append(rec.result)

    print(f"eta = {args.eta}, {args.nodes} nodes, {args.sources} sources, "
          f"{args.reps} replicates\n")
    print("  v      peak fc   slot@peak   steady fc   slots")
    for v in sorted(by_v):
        results = by_v[v]
        peaks = [float(r.coop_fraction.max()) for r in results]
        peak_slots = [int(np.argmax(r.coop_fraction)) + 1 for r in results]
        steadies = [steady_state_fraction(r) for r in results]
        slots = [r.slots for r in results]
        print(
            f"  {v:4.1f}   {np.mean(peaks):7.3f}   {np.mean(peak_slots):9.1f}"
            f"   {np.mean(steadies):9.4f}   {np.mean(slots):7.1f}"
        )

    print(
        "\nthe mobility advantage lives in the transient peak; by the time"
        "\nthe strategies settle, the novelty that paid for cooperation is gone"
    )


if __name__ == "__main__":
    main()
