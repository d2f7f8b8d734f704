"""Random-restart plus coordinate-descent search for profile counterexamples.

Each inequality id maps a parameter vector to an exact margin (``rhs - lhs``,
negative means violated).  The search minimises the margin: many random
restarts, then coordinate descent from the most promising starts.  Moves are
projected back onto valid profiles: monotone values first, slope caps second.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConfigError
from .kprofile import (
    BoundTrace,
    KProfile,
    bound_gap,
    clamp_oracle,
    enumeration_conditions,
    kakeya_chain_bound,
    prop12_margin,
    select_eta,
    sqrt_bracket,
    teal_check,
    x_hypothesis,
)

INEQUALITIES = (
    "teal-after-clamp",
    "enumeration-after-clamp",
    "lower-vs-upper-gap",
    "kakeya-chain",
    "prop12-effective",
)
CONTROLS = ("teal-no-clamp",)
VALUE_DEN = 8  # profile values live on the 1/8 grid
PROP_DEN = 1024


@dataclass(frozen=True)
class SearchConfig:
    inequality: str
    n_breakpoints: int = 6
    n_seeds: int = 10_000
    eps_grid: tuple[Fraction, ...] = (Fraction(1, 100), Fraction(4, 100))
    R: int = 1024
    descent_starts: int = 4
    descent_rounds: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.inequality not in INEQUALITIES + CONTROLS:
            raise ConfigError(f"unknown inequality {self.inequality!r}")
        if self.R < 4 or self.n_breakpoints < 1:
            raise ConfigError("need R >= 4 and at least one breakpoint")


@dataclass
class SearchResult:
    inequality: str
    worst_margin: Fraction
    worst_seed: int
    worst_eps: Fraction
    worst_params: tuple
    trace: BoundTrace
    evaluations: int = 0
    violations: int = 0
    notes: list = field(default_factory=list)

    @property
    def violated(self) -> bool:
        return self.worst_margin < 0


# ---------------------------------------------------------------------------
# parameter vectors
# ---------------------------------------------------------------------------
# Profile inequalities: (r, positions..., values...) as integers; positions
# are interior breakpoints in (0, R), values are numerators over VALUE_DEN.
# kakeya-chain carries two value blocks (the marginal and the remainder).
# prop12-effective: (d, s) as numerators over PROP_DEN.


def _n_value_blocks(ineq: str) -> int:
    return 2 if ineq == "kakeya-chain" else 1


def _dim(ineq: str) -> int:
    return 1 if ineq == "kakeya-chain" else 2


def project(params: list[int], ineq: str, k: int, R: int) -> list[int]:
    """Snap a parameter vector onto valid profiles."""
    if ineq == "prop12-effective":
        d = min(max(params[0], 0), 2 * PROP_DEN)
        s = min(max(params[1], 1), PROP_DEN)
        return [d, s]
    r = min(max(params[0], 1), R)
    pos = sorted(set(min(max(p, 1), R - 1) for p in params[1:1 + k]))
    while len(pos) < k:  # keep the vector length fixed
        cand = next(v for v in range(1, R) if v not in pos)
        pos = sorted(pos + [cand])
    n = _dim(ineq)
    out = [r] + pos
    for b in range(_n_value_blocks(ineq)):
        vals = params[1 + k + b * (k + 1): 1 + k + (b + 1) * (k + 1)]
        xs = pos + [R]
        fixed, prev, prev_x = [], 0, 0
        for x, v in zip(xs, vals):
            v = max(v, prev)  # monotone first
            v = min(v, prev + n * VALUE_DEN * (x - prev_x))  # then slope cap
            fixed.append(v)
            prev, prev_x = v, x
        out += fixed
    return out


def _profile(pos, vals, n, R) -> KProfile:
    pts = [(Fraction(0), Fraction(0))]
    pts += [(Fraction(x), Fraction(v, VALUE_DEN)) for x, v in zip(list(pos) + [R], vals)]
    return KProfile(n, Fraction(R), tuple(pts))


def random_params(rng: np.random.Generator, ineq: str, k: int, R: int) -> list[int]:
    if ineq == "prop12-effective":
        return [int(rng.integers(0, 2 * PROP_DEN + 1)), int(rng.integers(1, PROP_DEN + 1))]
    n = _dim(ineq)
    r = int(rng.integers(1, R + 1)) if rng.random() < 0.5 else R
    pos = sorted(int(v) for v in rng.choice(np.arange(1, R), size=k, replace=False))
    out = [r] + pos
    xs = [0] + pos + [R]
    for _ in range(_n_value_blocks(ineq)):
        # slopes mixed between flat, full and intermediate
        kind = rng.integers(0, 3, size=k + 1)
        frac = np.where(kind == 0, 0, np.where(kind == 1, VALUE_DEN, rng.integers(0, VALUE_DEN + 1, size=k + 1)))
        v, vals = 0, []
        for i in range(k + 1):
            v += int(frac[i]) * n * (xs[i + 1] - xs[i])
            vals.append(v)
        out += vals
    return project(out, ineq, k, R)


# ---------------------------------------------------------------------------
# objectives
# ---------------------------------------------------------------------------


def evaluate(params: list[int], ineq: str, eps: Fraction, k: int, R: int) -> tuple[Fraction, BoundTrace]:
    """Exact margin of one parameter vector (negative = violation)."""
    if ineq == "prop12-effective":
        d, s = Fraction(params[0], PROP_DEN), Fraction(params[1], PROP_DEN)
        m = prop12_margin(d, s)
        tr = BoundTrace(ineq, {"d": d, "s": s}, {}, margin=m)
        return m, tr
    r = Fraction(params[0])
    pos = params[1:1 + k]
    n = _dim(ineq)
    f = _profile(pos, params[1 + k: 2 + 2 * k], n, R)
    if ineq == "kakeya-chain":
        g = _profile(pos, params[2 + 2 * k: 3 + 3 * k], 1, R)
        f_ab = KProfile(2, f.R, tuple((x, v + w) for (x, v), (_, w) in zip(f.breakpoints, g.breakpoints)))
        _, tr = kakeya_chain_bound(f, f_ab, r, eps)
        tr.inputs.update(eps=eps, r=r)
        return _margin_or_fail(tr), tr
    return profile_margin(f, r, eps, ineq)


def profile_margin(f: KProfile, r, eps, ineq: str) -> tuple[Fraction, BoundTrace]:
    """Margin of a single-profile inequality on ``f`` at scale ``r``."""
    tr = BoundTrace(ineq, {"r": r, "eps": eps, "f": f})
    if ineq == "teal-no-clamp":
        res = teal_check(f, r, eps)
        tr.margin = res.margin
        return res.margin, tr
    if ineq == "lower-vs-upper-gap":
        tr = bound_gap(f, r, eps)
        return _margin_or_fail(tr), tr
    choice = select_eta(f, r, eps)
    clamped, applied = clamp_oracle(f, r, choice.eta)
    tr.intermediates.update(c_r=choice.c_r, eta=choice.eta, eta_fallback=choice.fallback,
                            clamp=clamped, clamp_applied=applied)
    if not applied:
        tr.failed_stage = "clamp"
        return _margin_or_fail(tr), tr
    if ineq == "teal-after-clamp":
        m = teal_check(clamped, r, eps).margin
    else:
        delta = sqrt_bracket(eps).lo
        m = enumeration_conditions(clamped, x_hypothesis(eps, r), r, eps, choice.eta, delta).margin
    tr.margin = m
    return m, tr


def _margin_or_fail(tr: BoundTrace) -> Fraction:
    if tr.failed_stage is not None:
        tr.margin = Fraction(-10 ** 9)  # a stage that should always pass did not
    return tr.margin


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def _descend(params, ineq, eps, k, R, rounds):
    best, _ = evaluate(params, ineq, eps, k, R)
    evals = 1
    step0 = max(R // 8, 1) if ineq != "prop12-effective" else PROP_DEN // 8
    for _ in range(rounds):
        step = step0
        while step >= 1:
            improved = False
            for i in range(len(params)):
                for sgn in (1, -1):
                    cand = list(params)
                    cand[i] += sgn * step * (VALUE_DEN if i > k and ineq != "prop12-effective" else 1)
                    cand = project(cand, ineq, k, R)
                    if cand == params:
                        continue
                    m, _ = evaluate(cand, ineq, eps, k, R)
                    evals += 1
                    if m < best:
                        best, params, improved = m, cand, True
            if not improved:
                step //= 2
    return params, best, evals


def adversarial_search(cfg: SearchConfig) -> SearchResult:
    """Minimise the margin of ``cfg.inequality`` over random profiles.

    Seeds are spread round-robin over the epsilon grid, so ``n_seeds`` is the
    total number of restarts.  Ties in the final reduction go to the smaller
    seed.
    """
    k, R, ineq = cfg.n_breakpoints, cfg.R, cfg.inequality
    pool = []  # (margin, seed, eps, params)
    evals = violations = 0
    for seed in range(cfg.n_seeds):
        rng = np.random.default_rng([cfg.seed, seed])
        eps = cfg.eps_grid[seed % len(cfg.eps_grid)]
        params = random_params(rng, ineq, k, R)
        m, _ = evaluate(params, ineq, eps, k, R)
        evals += 1
        violations += m < 0
        pool.append((m, seed, eps, params))
    pool.sort(key=lambda item: (item[0], item[1]))
    finals = []
    for m, seed, eps, params in pool[: cfg.descent_starts]:
        p2, m2, ev = _descend(params, ineq, eps, k, R, cfg.descent_rounds)
        evals += ev
        finals.append((m2, seed, eps, p2))
    finals += pool[:1]
    finals.sort(key=lambda item: (item[0], item[1]))
    m, seed, eps, params = finals[0]
    _, trace = evaluate(params, ineq, eps, k, R)
    return SearchResult(ineq, m, seed, eps, tuple(params), trace, evals, violations)
