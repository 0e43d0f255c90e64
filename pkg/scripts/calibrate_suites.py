#!/usr/bin/env python3
"""Null calibration: run every verification suite at many distinct seeds.

Each suite is expected to pass with probability at least 0.99 when its
kernel genuinely satisfies the theorem being checked, so over 50 seeds more
than one failure flags a miscalibrated threshold.  Exit code 1 in that case.

Usage:
    python scripts/calibrate_suites.py [--seeds 50] [--workers N] [--suites clt,renewal]
"""

import argparse
import sys
import time

from semimarkov.presets import symmetric_telegraph, three_state_aperiodic
from semimarkov.verify import (
    clt_suite,
    ergodic_suite,
    occupancy_suite,
    renewal_suite,
    residual_suite,
)


def run_suite(name: str, seed: int, workers: int):
    telegraph = symmetric_telegraph()
    if name == "clt":
        return clt_suite(telegraph, lam=400.0, n_reps=20_000, seed=seed, workers=workers)
    if name == "renewal":
        return renewal_suite(telegraph, seed=seed, workers=workers)
    if name == "ergodic":
        return ergodic_suite(three_state_aperiodic(), f_tag="vx", seed=seed)
    if name == "residual":
        return residual_suite(telegraph, seed=seed, workers=workers)
    if name == "occupancy":
        return occupancy_suite(telegraph, T=1e5, seed=seed)
    raise ValueError(name)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=50)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument(
        "--suites", default="clt,renewal,ergodic,residual,occupancy",
        help="comma-separated subset",
    )
    args = parser.parse_args()

    worst = 0
    for name in args.suites.split(","):
        start = time.time()
        failures = []
        for seed in range(1, args.seeds + 1):
            rep = run_suite(name, seed, args.workers)
            if not rep.passed:
                failures.append((seed, [c.name for c in rep.checks if not c.passed]))
        rate = 1.0 - len(failures) / args.seeds
        worst = max(worst, len(failures))
        print(
            f"{name:10s} pass rate {rate:6.1%} over {args.seeds} seeds "
            f"({time.time() - start:6.1f}s)"
            + (f"  failures: {failures}" if failures else "")
        )
    if worst > 1:
        print("CALIBRATION SUSPECT: some suite failed more than once under the null")
        return 1
    print("calibration consistent with >= 0.99 null pass probability")
    return 0


if __name__ == "__main__":
    sys.exit(main())
