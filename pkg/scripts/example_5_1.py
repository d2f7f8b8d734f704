"""Graph set E over the squares schedule: box ratios of E and of its slope pencil per level.

Usage: python3 scripts/example_5_1.py [--j 256] [--every 8] [--out results.csv]
"""

import argparse
import csv
import sys
from dataclasses import dataclass

from lineal_lab.dyadic import box_count
from lineal_lab.suite import example_5_1_sets


@dataclass
class Config:
    j: int = 256
    every: int = 8
    out: str | None = None


def run(cfg: Config) -> list[tuple[int, float, float]]:
    e_set, pencil, rule_s = example_5_1_sets(cfg.j)
    rows = []
    for lv in range(cfg.every, cfg.j + 1, cfg.every):
        rows.append((lv, box_count(e_set, lv) / lv, box_count(pencil, lv) / lv))
    print(f"free_S({cfg.j}) = {rule_s.free_count(cfg.j)}")
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--j", type=int, default=Config.j)
    ap.add_argument("--every", type=int, default=Config.every)
    ap.add_argument("--out")
    cfg = Config(**vars(ap.parse_args()))
    rows = run(cfg)
    w = csv.writer(open(cfg.out, "w", newline="") if cfg.out else sys.stdout)
    w.writerow(["level", "E_ratio", "family_ratio"])
    for lv, e, fam in rows:
        w.writerow([lv, f"{e:.6f}", f"{fam:.6f}"])


if __name__ == "__main__":
    main()
