#!/usr/bin/env python3
"""Simulate players of different subitizing capacities and print the
measured-vs-theoretical streak-mean curve per level label.

An unlimited player tracks the closed form (label - 2) / 2; a capacity-k
player falls below it once levels demand counting past k.

Usage:
    python scripts/subitizing_curve.py [--players 1000] [--capacity 4]
    python scripts/subitizing_curve.py --capacity inf --csv curve.csv
"""

import argparse
import math
from pathlib import Path

from smnist.session import aggregate, aggregate_csv, simulate_many


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--players", type=int, default=1000)
    ap.add_argument("--capacity", default="4",
                    help="largest numerosity answered reliably, or 'inf'")
    ap.add_argument("--reaction-ms", type=int, default=800)
    ap.add_argument("--max-trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()

    capacity = math.inf if args.capacity == "inf" else float(args.capacity)
    results = simulate_many(args.players, capacity=capacity,
                            reaction_ms=args.reaction_ms, seed=args.seed,
                            max_trials=args.max_trials)
    rows = aggregate([s.records for s, _ in results])

    print(f"capacity={args.capacity} players={args.players}")
    print(f"{'label':>6}{'measured':>12}{'theoretical':>13}{'gap':>10}{'n':>8}")
    for r in rows:
        gap = r.measured - r.theoretical
        print(f"{r.label:>6}{r.measured:>12.4f}{r.theoretical:>13.4f}{gap:>+10.4f}{r.sessions:>8}")

    if args.csv:
        Path(args.csv).write_text(aggregate_csv(rows))
        print(f"wrote {args.csv}")


if __name__ == "__main__":
    main()
