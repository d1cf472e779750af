#!/usr/bin/env python3
"""Sweep the hand-velocity gain K_v and report star-topology tracking error/lag.

The velocity-coupling gain sets the standoff distance K_v*v/K while the hand
moves; this sweep shows the accuracy/compliance trade-off.

Usage: python scripts/sweep_velocity_gain.py [--gains 1,3,6,10]
"""

import argparse
from dataclasses import replace

from swarmlink.bench import default_bench_config, run_one
from swarmlink.impedance import critically_damped


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gains", default="1,2,3,5,8,10")
    args = ap.parse_args()
    gains = [float(g) for g in args.gains.split(",")]

    bench = default_bench_config(repeats=1, seed=1, noise_sigma=0.0)
    base = bench.scenario_for("impedance_star", seed=1)
    print(f"{'K_v':>6} {'mean_x':>8} {'mean_y':>8} {'max_x':>8} {'lag_s':>7}")
    for g in gains:
        p = base.impedance
        cfg = replace(
            base, impedance=critically_damped(p.mass, p.stiffness, velocity_gain=g)
        )
        _, m = run_one(cfg)
        print(
            f"{g:>6.1f} {m.mean_err_x:>8.4f} {m.mean_err_y:>8.4f} "
            f"{m.max_err_x:>8.4f} {m.lag_s:>7.2f}"
        )


if __name__ == "__main__":
    main()
