"""Direction-set and L_0 slopes of the two-point construction over random t.

Usage: python3 scripts/two_point_sharpness.py [--alpha 1/2] [--k 10] [--samples 20] [--seed 0]
"""

import argparse
import statistics
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from lineal_lab import constructions as cons
from lineal_lab.suite import two_point_sample


@dataclass
class Config:
    alpha: str = "1/2"
    k: int = 10
    samples: int = 20
    seed: int = 0
    j0: int = 6
    j1: int = 16


def run(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    s = cons.cantor_dimension(Fraction(cfg.alpha))
    out = []
    for _ in range(cfg.samples):
        t = cons.random_dyadic_t(rng)
        d_rep, e_rep = two_point_sample(cfg.alpha, t, cfg.k, (cfg.j0, cfg.j1))
        out.append((t, d_rep.regression_slope, e_rep.upper_box))
        print(f"t={str(t):>12}  direction slope={d_rep.regression_slope:.4f}  L_0 upper box={e_rep.upper_box:.4f}")
    med = statistics.median(v for _, v, _ in out)
    print(f"s={s:.4f}  median direction slope={med:.4f}  (2s={2 * s:.4f}, 2s+1={2 * s + 1:.4f})")
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(Config()).items():
        ap.add_argument(f"--{name}", type=type(default), default=default)
    run(Config(**vars(ap.parse_args())))


if __name__ == "__main__":
    main()
