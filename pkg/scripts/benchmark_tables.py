#!/usr/bin/env python3
"""Generate the dataset catalog and measure classifier accuracies on it.

Produces the benchmark rows this package is built around: softmax regression
across both series, the hard tail-heavy family at each maximum count, and the
MLP on the small-count vs large-count glyph datasets.

Usage:
    python scripts/benchmark_tables.py [--workdir runs/tables] [--seed 3]
    python scripts/benchmark_tables.py --quick      # 1/10th-size datasets
"""

import argparse
import time
from pathlib import Path

from smnist.datasets import generate_pair, preset, write_dataset
from smnist.training import load_arrays, mlp_config, softmax_config, train

SERIES1 = ["m1-naive", "m1-no-centering", "m1-disjunct", "m1-disjunct-1px",
           "m1-hard", "m1-hard-1px"]
SERIES2 = ["m2-disjunct", "m2-hard", "m2-disjunct-102x", "m2-hard-102x"]
HARD_FAMILY = ["m2-4h-102x", "m2-5h-102x", "m2-6h-102x", "m2-7h-102x", "m2-8h-102x"]
GLYPHS = ["a2-h3-102x", "a2-hard-102x"]


def ensure_dataset(workdir: Path, name: str, seed: int, quick: bool) -> Path:
    outdir = workdir / name
    if not (outdir / "manifest.json").exists():
        overrides = {}
        if quick:
            spec = preset(name, seed=seed)
            overrides = {"train_count": spec.train_count // 10,
                         "test_count": spec.test_count // 10}
        t0 = time.perf_counter()
        pair = generate_pair(preset(name, seed=seed, **overrides))
        write_dataset(pair, outdir)
        print(f"  generated {name} in {time.perf_counter() - t0:.1f}s")
    return outdir


def accuracy(outdir: Path, config) -> float:
    x, y, xt, yt, _ = load_arrays(outdir)
    _, metrics, _ = train((x, y), (xt, yt), config)
    return metrics.accuracy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--workdir", default="runs/tables")
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--quick", action="store_true",
                    help="tenth-size datasets for a fast smoke run")
    args = ap.parse_args()
    workdir = Path(args.workdir)
    workdir.mkdir(parents=True, exist_ok=True)

    print("== softmax regression, series 1 (28x28) ==")
    for name in SERIES1:
        d = ensure_dataset(workdir, name, args.seed, args.quick)
        print(f"{name:>18}: {accuracy(d, softmax_config(seed=args.seed)):.4f}")

    print("== softmax regression, series 2 (10x10) ==")
    for name in SERIES2:
        d = ensure_dataset(workdir, name, args.seed, args.quick)
        print(f"{name:>18}: {accuracy(d, softmax_config(seed=args.seed)):.4f}")

    print("== softmax regression, hard family by maximum count ==")
    print("   (300-step probe: the frequency-regime plateau)")
    for name in HARD_FAMILY:
        d = ensure_dataset(workdir, name, args.seed, args.quick)
        print(f"{name:>18}: {accuracy(d, softmax_config(seed=args.seed, steps=300)):.4f}")

    print("== one-hidden-layer MLP, glyph datasets ==")
    for name in GLYPHS:
        d = ensure_dataset(workdir, name, args.seed, args.quick)
        print(f"{name:>18}: {accuracy(d, mlp_config(seed=args.seed)):.4f}")


if __name__ == "__main__":
    main()
