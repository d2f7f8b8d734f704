"""Adversarial search over every profile inequality plus the no-clamp control.

Usage: python3 scripts/profile_search.py [--seeds 10000] [--R 1024] [--breakpoints 6] [--seed 0]
"""

import argparse
import time
from dataclasses import dataclass

from lineal_lab.search import CONTROLS, INEQUALITIES, SearchConfig, adversarial_search


@dataclass
class Config:
    seeds: int = 10_000
    R: int = 1024
    breakpoints: int = 6
    seed: int = 0


def run(cfg: Config) -> dict:
    results = {}
    for ineq in INEQUALITIES + CONTROLS:
        t0 = time.perf_counter()
        res = adversarial_search(SearchConfig(ineq, cfg.breakpoints, cfg.seeds, R=cfg.R, seed=cfg.seed))
        results[ineq] = res
        print(f"{ineq:26s} worst={float(res.worst_margin):>12.6g}  eps={res.worst_eps}  "
              f"violating restarts={res.violations:5d}  ({time.perf_counter() - t0:.1f} s)")
    return results


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(Config()).items():
        ap.add_argument(f"--{name}", type=type(default), default=default)
    run(Config(**vars(ap.parse_args())))


if __name__ == "__main__":
    main()
