#!/usr/bin/env python3
"""Run the three stock compliance pools and print one line per scenario.

Usage: python scripts/run_pools.py [--horizon N] [--seed S]
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from gtpsim.cli import cmd_verify
from gtpsim.scenario import STOCK_POOLS


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--horizon", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    total_failures = 0
    for name, pool in STOCK_POOLS.items():
        start = time.perf_counter()
        failures, lines = cmd_verify(pool(horizon=args.horizon, seed=args.seed))
        elapsed = time.perf_counter() - start
        print(f"== pool {name} ({elapsed:.1f}s) ==")
        print("\n".join(lines))
        total_failures += failures
    return 1 if total_failures else 0


if __name__ == "__main__":
    sys.exit(main())
