#!/usr/bin/env python3
"""Plot trajectories and per-axis errors from a benchmark output directory.

Usage: python scripts/plot_comparison.py bench_out [--seed S] [--save fig.png]
Needs matplotlib (not a package dependency).
"""

import argparse
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from swarmlink.trace import Trace

CONFIGS = ("impedance_star", "impedance_ring", "impedance_tree", "potential_field")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("bench_dir")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--save", default="comparison.png")
    args = ap.parse_args()

    bench_dir = Path(args.bench_dir)
    report = json.loads((bench_dir / "report.json").read_text())
    seed = args.seed if args.seed is not None else report["seed"]
    ref = np.array(
        [
            [float(v) for v in line.split(",")[1:3]]
            for line in (bench_dir / "ref.csv").read_text().splitlines()[1:]
            if line
        ]
    )

    fig, axes = plt.subplots(2, 2, figsize=(11, 9))
    for ax, name in zip(axes.flat, CONFIGS):
        trace = Trace.read_csv(bench_dir / f"trace_{name}_seed{seed}.csv")
        ax.plot(ref[:, 0], ref[:, 1], "k--", lw=1, label="reference")
        for d in range(trace.n_drones):
            ax.plot(trace.pos[:, d, 0], trace.pos[:, d, 1], lw=0.8, label=f"drone {d}")
        m = report["configs"][name]["metrics"]
        ax.set_title(f"{name}  mean err ({m['mean_err_x']:.3f}, {m['mean_err_y']:.3f}) m")
        ax.set_aspect("equal")
        ax.legend(fontsize=7)
    fig.suptitle("square-trajectory following by configuration")
    fig.tight_layout()
    fig.savefig(args.save, dpi=140)
    print(f"wrote {args.save}")


if __name__ == "__main__":
    main()
