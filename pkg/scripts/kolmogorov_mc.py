#!/usr/bin/env python3
"""Monte-Carlo study of the randomized mean-variance outcome strategy.

Recomputes, over many seeds, (a) how often the running mean S_n/n escapes
[-1/2, 1/2] late in the run when v_n = n^2 (the two-point branch), and
(b) the mean number of nonzero moves when v_n = 1 (the three-point branch,
where the count converges to a finite value).

Usage: python scripts/kolmogorov_mc.py [--seeds N] [--horizon N]
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from gtpsim.randomized import uniform_block


def escape_fraction(seeds: int, horizon: int) -> float:
    ns = np.arange(1, horizon + 1, dtype=np.float64)
    window = horizon // 2
    hits = 0
    for seed in range(seeds):
        u = uniform_block(seed, horizon)
        steps = np.where(u < 0.5, ns, -ns)
        ratio = np.abs(np.cumsum(steps))[window - 1:] / ns[window - 1:]
        hits += ratio.max() >= 0.5
    return hits / seeds


def mean_nonzero_count(seeds: int, horizon: int) -> float:
    ns = np.arange(1, horizon + 1, dtype=np.float64)
    thresholds = 1.0 / (ns * ns)   # P(x_n != 0) for v = 1, n >= 2
    total = 0
    for seed in range(seeds):
        u = uniform_block(seed, horizon)
        total += 1 + int(np.sum(u[1:] < thresholds[1:]))
    return total / seeds


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--seeds", type=int, default=10_000)
    parser.add_argument("--horizon", type=int, default=1_000)
    args = parser.parse_args()

    frac = escape_fraction(min(args.seeds, 1_000), args.horizon)
    print(f"v=n^2: fraction of paths with late |S_n/n| >= 0.5: {frac:.4f}")
    mean = mean_nonzero_count(args.seeds, args.horizon)
    expected = 1.0 + float(np.sum(1.0 / np.arange(2, args.horizon + 1) ** 2))
    print(f"v=1:   mean nonzero-move count: {mean:.4f} (expected ~{expected:.4f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
