#!/usr/bin/env python3
"""Run the full topology comparison and print the report table.

Usage: python scripts/run_benchmark.py [out_dir] [--repeats N] [--seed S] [--noise-free]
"""

import argparse
from pathlib import Path

from swarmlink.bench import default_bench_config, format_report, run_comparison


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out_dir", nargs="?", default="bench_out")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--noise-free", action="store_true")
    args = ap.parse_args()

    bench = default_bench_config(
        repeats=args.repeats,
        seed=args.seed,
        noise_sigma=0.0 if args.noise_free else None,
    )
    report = run_comparison(bench, out_dir=Path(args.out_dir))
    print(format_report(report))
    print(f"\nartifacts in {args.out_dir}/")


if __name__ == "__main__":
    main()
