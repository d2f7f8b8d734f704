"""Exact piecewise-linear complexity profiles and the bound pipelines built on them.

A profile models ``r -> K_r(z)`` with every logarithmic error term dropped:
it starts at ``(0, 0)``, is nondecreasing, and its slopes lie in ``[0, n]``.
All arithmetic is in :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Callable, Iterable

from .errors import ConfigError, FormatError, RangeError

Q = Fraction


def q(v) -> Fraction:
    if type(v) is Fraction:
        return v
    if isinstance(v, float):
        raise ConfigError(f"profiles take exact rationals, got float {v!r}")
    return Fraction(v)


# ---------------------------------------------------------------------------
# square roots of epsilon
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SqrtBracket:
    lo: Fraction
    hi: Fraction

    @property
    def exact(self) -> bool:
        return self.lo == self.hi


def sqrt_bracket(eps, digits: int = 12) -> SqrtBracket:
    """Rational bounds on ``sqrt(eps)``; exact when ``eps`` is a rational square."""
    eps = q(eps)
    if eps < 0:
        raise RangeError("negative epsilon")
    n, d = eps.numerator, eps.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return SqrtBracket(Q(rn, rd), Q(rn, rd))
    scale = 10 ** digits
    s = math.isqrt(n * d * scale * scale)
    return SqrtBracket(Q(s, d * scale), Q(s + 1, d * scale))


def _check_eps(eps) -> Fraction:
    eps = q(eps)
    if not 0 < eps < 1:
        raise RangeError("epsilon must lie in (0, 1)")
    return eps


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KProfile:
    n: int
    R: Fraction
    breakpoints: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        R = q(self.R)
        object.__setattr__(self, "R", R)
        bps = tuple(p if type(p[0]) is Fraction and type(p[1]) is Fraction else (q(p[0]), q(p[1]))
                    for p in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        if self.n < 1:
            raise ConfigError("ambient dimension must be positive")
        if R <= 0:
            raise ConfigError("horizon must be positive")
        if not bps or bps[0] != (0, 0):
            raise ConfigError("profiles start at (0, 0)")
        if bps[-1][0] != R:
            raise ConfigError("last breakpoint must sit at the horizon")
        for (r0, v0), (r1, v1) in zip(bps, bps[1:]):
            if r1 <= r0:
                raise ConfigError("breakpoint positions must increase strictly")
            if not 0 <= v1 - v0 <= self.n * (r1 - r0):
                raise ConfigError(f"slope on [{r0}, {r1}] outside [0, {self.n}]")

    # construction -----------------------------------------------------------

    @classmethod
    def from_points(cls, n: int, points: Iterable) -> "KProfile":
        """Profile through ``points``; ``(0, 0)`` is prepended when missing."""
        pts = [(q(r), q(v)) for r, v in points]
        if not pts or pts[0][0] != 0:
            pts.insert(0, (Q(0), Q(0)))
        return cls(n, pts[-1][0], tuple(_simplify(pts)))

    @classmethod
    def linear(cls, n: int, R, slope) -> "KProfile":
        R, slope = q(R), q(slope)
        return cls(n, R, ((Q(0), Q(0)), (R, slope * R)))

    @classmethod
    def zero(cls, n: int, R) -> "KProfile":
        return cls.linear(n, R, 0)

    @classmethod
    def from_slopes(cls, n: int, positions, slopes) -> "KProfile":
        """Breakpoints at ``positions`` (ending at the horizon) with given segment slopes."""
        pts, r0, v = [(Q(0), Q(0))], Q(0), Q(0)
        for r, s in zip(positions, slopes):
            r = q(r)
            v += q(s) * (r - r0)
            pts.append((r, v))
            r0 = r
        return cls(n, r0, tuple(pts))

    # evaluation -------------------------------------------------------------

    @cached_property
    def positions(self) -> tuple[Fraction, ...]:
        return tuple(r for r, _ in self.breakpoints)

    @cached_property
    def _at(self) -> dict:
        return dict(self.breakpoints)

    def __call__(self, t) -> Fraction:
        hit = self._at.get(t)
        if hit is not None:
            return hit
        t = q(t)
        if not 0 <= t <= self.R:
            raise RangeError(f"{t} outside [0, {self.R}]")
        bps = self.breakpoints
        i = bisect_right(self.positions, t) - 1
        if i >= len(bps) - 1:
            return bps[-1][1]
        (r0, v0), (r1, v1) = bps[i], bps[i + 1]
        return v0 + (v1 - v0) * (t - r0) / (r1 - r0)

    def slopes(self) -> list[Fraction]:
        bps = self.breakpoints
        return [(v1 - v0) / (r1 - r0) for (r0, v0), (r1, v1) in zip(bps, bps[1:])]

    def truncate(self, r) -> "KProfile":
        r = q(r)
        if not 0 < r <= self.R:
            raise RangeError("truncation point outside (0, R]")
        pts = [(a, v) for a, v in self.breakpoints if a < r]
        pts.append((r, self(r)))
        return KProfile(self.n, r, tuple(pts))

    def grid(self, lo, hi) -> list[Fraction]:
        """``lo``, ``hi`` and every breakpoint strictly between them."""
        lo, hi = q(lo), q(hi)
        return [lo] + [r for r in self.positions if lo < r < hi] + ([hi] if hi != lo else [])

    # text format ------------------------------------------------------------

    def to_kprof(self) -> str:
        lines = [f"KPROF 1 n={self.n} R={_rat(self.R)}"]
        lines += [f"bp {_rat(r)} {_rat(v)}" for r, v in self.breakpoints]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_kprof(cls, text: str) -> "KProfile":
        rows = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not rows:
            raise FormatError("empty KPROF text")
        head = rows[0].split()
        if head[:2] != ["KPROF", "1"]:
            raise FormatError(f"bad KPROF header: {rows[0]!r}")
        opts = dict(tok.split("=", 1) for tok in head[2:])
        try:
            n, R = int(opts["n"]), Q(opts["R"])
        except (KeyError, ValueError) as exc:
            raise FormatError(f"bad KPROF header: {rows[0]!r}") from exc
        bps = []
        for ln in rows[1:]:
            parts = ln.split()
            if len(parts) != 3 or parts[0] != "bp":
                raise FormatError(f"bad KPROF record: {ln!r}")
            bps.append((Q(parts[1]), Q(parts[2])))
        return cls(n, R, tuple(bps))


def _rat(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def _simplify(points):
    """Drop breakpoints interior to a straight run."""
    out = list(points[:2])
    for p in points[2:]:
        (r0, v0), (r1, v1) = out[-2], out[-1]
        if (v1 - v0) * (p[0] - r1) == (p[1] - v1) * (r1 - r0):
            out[-1] = p
        else:
            out.append(p)
    return out


def _combine(f: KProfile, g: KProfile, op: Callable, n: int) -> KProfile:
    if f.R != g.R:
        raise ConfigError("profiles must share a horizon")
    rs = sorted(set(f.positions) | set(g.positions))
    return KProfile(n, f.R, tuple((r, op(f(r), g(r))) for r in rs))


def join(f_y: KProfile, f_x_given_y: KProfile) -> KProfile:
    """Pointwise sum; the ambient dimensions add."""
    return _combine(f_y, f_x_given_y, lambda a, b: a + b, f_y.n + f_x_given_y.n)


def subtract(f: KProfile, g: KProfile, n: int | None = None) -> KProfile:
    """Pointwise difference, validated as a profile of dimension ``n``."""
    return _combine(f, g, lambda a, b: a - b, f.n - g.n if n is None else n)


def dominates(f: KProfile, g: KProfile) -> bool:
    """True when ``f >= g`` everywhere (checked on merged breakpoints)."""
    if f.R != g.R:
        raise ConfigError("profiles must share a horizon")
    return all(f(r) >= g(r) for r in set(f.positions) | set(g.positions))


def dim_of(f: KProfile, r_min) -> Fraction:
    """Minimum of ``f(r)/r`` over ``[r_min, R]``."""
    return min(f(r) / r for r in _ratio_grid(f, r_min))


def Dim_of(f: KProfile, r_min) -> Fraction:
    """Maximum of ``f(r)/r`` over ``[r_min, R]``."""
    return max(f(r) / r for r in _ratio_grid(f, r_min))


def _ratio_grid(f: KProfile, r_min) -> list[Fraction]:
    r_min = q(r_min)
    if not 0 < r_min < f.R:
        raise ConfigError("r_min must lie in (0, R)")
    return f.grid(r_min, f.R)


# ---------------------------------------------------------------------------
# pipeline pieces
# ---------------------------------------------------------------------------


def c_r_of(f: KProfile, r) -> Fraction:
    """Largest minimiser of ``f(t) - t`` on ``[1, r]``."""
    r = q(r)
    if not 1 <= r <= f.R:
        raise RangeError("r must lie in [1, R]")
    best_t, best = None, None
    for t in f.grid(1, r):
        val = f(t) - t
        if best is None or val <= best:
            best_t, best = t, val
    return best_t


def eta_grid_exponent(eps) -> int:
    """``m = 2 - ceil(log2 eps)``, computed exactly."""
    eps = q(eps)
    k = 0
    while Q(2) ** (k - 1) >= eps:
        k -= 1
    while Q(2) ** k < eps:
        k += 1
    return 2 - k


@dataclass(frozen=True)
class EtaChoice:
    eta: Fraction
    fallback: bool
    m: int
    interval: tuple[Fraction, Fraction]
    c_r: Fraction
    beta: Fraction


def select_eta(f: KProfile, r, eps) -> EtaChoice:
    """Smallest ``i / 2^m`` strictly inside ``(beta - 2 sqrt eps, beta - sqrt eps)``.

    ``beta = (r - c_r + f(c_r)) / r``.  When no grid point qualifies the
    choice falls back to 0 and says so.  An inexact root shrinks the interval
    on both sides.
    """
    eps = _check_eps(eps)
    r = q(r)
    c = c_r_of(f, r)
    beta = (r - c + f(c)) / r
    sq = sqrt_bracket(eps)
    left, right = beta - 2 * sq.lo, beta - sq.hi
    m = eta_grid_exponent(eps)
    scale = 1 << m
    i = max(math.floor(left * scale) + 1, 0)
    if i <= scale and Q(i, scale) < right:
        return EtaChoice(Q(i, scale), False, m, (left, right), c, beta)
    return EtaChoice(Q(0), True, m, (left, right), c, beta)


def clamp_oracle(f: KProfile, r, eta) -> tuple[KProfile, bool]:
    """``t -> min(eta r, f(t))`` on ``[0, r]``.

    Returns ``(profile, applied)``.  When ``eta r > f(r)`` nothing is clamped
    and the truncation of ``f`` comes back with ``applied = False``.
    """
    r, eta = q(r), q(eta)
    base = f.truncate(r)
    cap = eta * r
    if cap > base(r):
        return base, False
    if cap < 0:
        raise RangeError("eta must be nonnegative")
    pts = [(Q(0), Q(0))]
    bps = base.breakpoints
    for (r0, v0), (r1, v1) in zip(bps, bps[1:]):
        if v0 >= cap:
            break
        pts.append((r0, v0))
        if v1 >= cap:
            pts.append((r0 + (cap - v0) * (r1 - r0) / (v1 - v0), cap))
            break
    if pts[-1][0] != r:
        pts.append((r, cap))
    pts = sorted(set(pts))
    return KProfile(f.n, r, tuple(_simplify(pts))), True


@dataclass(frozen=True)
class TealResult:
    ok: bool
    margin: Fraction
    argmin: Fraction

    def __bool__(self):
        return self.ok


def teal_check(f: KProfile, r, eps) -> TealResult:
    """``f(s) >= f(r) - (1 - sqrt eps)(r - s)`` for every ``s`` in ``[1, r]``."""
    r = q(r)
    root = sqrt_bracket(eps).lo
    fr = f(r)
    worst, arg = None, None
    for s in f.grid(1, r):
        m = f(s) - fr + (1 - root) * (r - s)
        if worst is None or m < worst:
            worst, arg = m, s
    return TealResult(worst >= 0, worst, arg)


def x_hypothesis(eps, R) -> KProfile:
    """Profile ``(1 - eps/2) t`` standing in for the point on the line."""
    return KProfile.linear(1, R, 1 - q(eps) / 2)


@dataclass(frozen=True)
class EnumerationCheck:
    cond1: bool
    cond2: bool
    margin1: Fraction
    margin2: Fraction
    argmin2: Fraction

    @property
    def ok(self) -> bool:
        return self.cond1 and self.cond2

    @property
    def margin(self) -> Fraction:
        return min(self.margin1, self.margin2)

    def __bool__(self):
        return self.ok


def enumeration_conditions(f_abD: KProfile, f_x_cond: KProfile, r, eps, eta, delta,
                           s_min=1) -> EnumerationCheck:
    """Both enumeration conditions, swept exactly over ``s`` in ``[s_min, r]``.

    (1) ``f_abD(r) <= (eta + eps) r``;
    (2) ``f_abD(s) + f_x_cond(r - s) >= (eta - eps) r + delta (r - s)``.
    Condition (2) is piecewise linear in ``s`` with kinks at the breakpoints
    of ``f_abD`` and at ``r`` minus those of ``f_x_cond``.  Scales below 1
    are dropped, as in the choice of ``c_r``; pass ``s_min=0`` to include them.
    """
    r, eps, eta, delta, s_min = q(r), q(eps), q(eta), q(delta), q(s_min)
    if delta <= 0:
        raise RangeError("delta must be positive")
    m1 = (eta + eps) * r - f_abD(r)
    lo = min(s_min, r)
    kinks = {lo, r}
    kinks |= {s for s in f_abD.positions if lo < s < r}
    kinks |= {r - t for t in f_x_cond.positions if lo < r - t < r}
    worst, arg = None, None
    for s in sorted(kinks):
        m = f_abD(s) + f_x_cond(r - s) - (eta - eps) * r - delta * (r - s)
        if worst is None or m < worst:
            worst, arg = m, s
    return EnumerationCheck(m1 >= 0, worst >= 0, m1, worst, arg)


# ---------------------------------------------------------------------------
# bound pipelines
# ---------------------------------------------------------------------------


@dataclass
class BoundTrace:
    inequality: str
    inputs: dict = field(default_factory=dict)
    intermediates: dict = field(default_factory=dict)
    lower: Fraction | None = None
    upper: Fraction | None = None
    margin: Fraction | None = None
    failed_stage: str | None = None

    @property
    def completed(self) -> bool:
        return self.failed_stage is None

    def to_text(self) -> str:
        def fmt(v):
            if isinstance(v, Fraction):
                return _rat(v)
            if isinstance(v, KProfile):
                return " ".join(f"({_rat(r)},{_rat(x)})" for r, x in v.breakpoints)
            return str(v)

        out = [f"inequality: {self.inequality}"]
        out += [f"input.{k}: {fmt(v)}" for k, v in self.inputs.items()]
        out += [f"step.{k}: {fmt(v)}" for k, v in self.intermediates.items()]
        out += [
            f"lower: {fmt(self.lower)}",
            f"upper: {fmt(self.upper)}",
            f"margin: {fmt(self.margin)}",
            f"status: {'FAILED at ' + self.failed_stage if self.failed_stage else 'completed'}",
        ]
        return "\n".join(out) + "\n"


def lower_bound_xaxb(f_ab: KProfile, r, eps, trace: BoundTrace | None = None) -> tuple[Fraction | None, BoundTrace]:
    """Run the lower-bound pipeline and return ``r + f(c_r) + (r - c_r) - 7 sqrt(eps) r``.

    Stages: ``c_r``, ``eta``, clamp, teal, enumeration, assembly.  A failing
    stage ends the run and the value is None.
    """
    r, eps = q(r), _check_eps(eps)
    tr = trace if trace is not None else BoundTrace("lower-bound")
    tr.inputs.update(r=r, eps=eps, f_ab=f_ab)
    st = tr.intermediates
    choice = select_eta(f_ab, r, eps)
    c = choice.c_r
    st.update(c_r=c, f_c=f_ab(c), beta=choice.beta, eta=choice.eta, eta_fallback=choice.fallback)
    clamped, applied = clamp_oracle(f_ab, r, choice.eta)
    st.update(clamp=clamped, clamp_applied=applied)
    if not applied:
        tr.failed_stage = "clamp"
        return None, tr
    teal = teal_check(clamped, r, eps)
    st.update(teal_ok=teal.ok, teal_margin=teal.margin)
    if not teal.ok:
        tr.failed_stage = "teal"
        return None, tr
    root = sqrt_bracket(eps)
    enum = enumeration_conditions(clamped, x_hypothesis(eps, r), r, eps, choice.eta, root.lo)
    st.update(cond1=enum.cond1, cond2=enum.cond2, enum_margin=enum.margin)
    if not enum.ok:
        tr.failed_stage = "enumeration"
        return None, tr
    value = r + f_ab(c) + (r - c) - 7 * root.hi * r
    st.update(assembly=value)
    tr.lower = value
    return value, tr


def upper_bound_xaxb(f_ab: KProfile, r, eps) -> Fraction:
    """``c_r + f(c_r) + 2 (r - c_r) + 3 eps r``."""
    r, eps = q(r), _check_eps(eps)
    c = c_r_of(f_ab, r)
    return c + f_ab(c) + 2 * (r - c) + 3 * eps * r


def bound_gap(f_ab: KProfile, r, eps) -> BoundTrace:
    """Both bounds with margin ``10 sqrt(eps) r - (upper - lower)``."""
    lower, tr = lower_bound_xaxb(f_ab, r, eps, BoundTrace("lower-vs-upper-gap"))
    tr.upper = upper_bound_xaxb(f_ab, r, eps)
    if lower is not None:
        tr.margin = 10 * sqrt_bracket(eps).lo * q(r) - (tr.upper - lower)
    return tr


def kakeya_chain_bound(f_a: KProfile, f_ab: KProfile, r, eps) -> tuple[Fraction | None, BoundTrace]:
    """Replay the direction chain down to ``r + f_a(r) - 10 sqrt(eps) r``.

    Each step must not increase the running bound; the smallest step gap is
    the trace margin.
    """
    if f_a.R != f_ab.R:
        raise ConfigError("profiles must share a horizon")
    if not dominates(f_ab, f_a):
        raise ConfigError("the marginal profile must lie below the joint profile")
    r, eps = q(r), _check_eps(eps)
    tr = BoundTrace("kakeya-chain")
    tr.inputs["f_a"] = f_a
    lower, tr = lower_bound_xaxb(f_ab, r, eps, tr)
    if lower is None:
        return None, tr
    c = tr.intermediates["c_r"]
    root = sqrt_bracket(eps)
    chain = [
        lower,
        r + f_a(c) + (r - c) - 7 * root.hi * r,
        r + f_a(r) - 7 * root.hi * r,
        r + f_a(r) - 10 * root.hi * r,
    ]
    gaps = [a - b for a, b in zip(chain, chain[1:])]
    tr.intermediates.update(chain=" >= ".join(_rat(v) for v in chain))
    tr.margin = min(gaps)
    if tr.margin < 0:
        tr.failed_stage = "chain"
        return None, tr
    tr.lower = chain[-1]
    return chain[-1], tr


def lutz_stull_value(d_x_given_ab, d_ab, d_x_rel) -> Fraction:
    """``d_x_given_ab + min(d_ab, d_x_rel)`` with range checks."""
    vals = [q(v) for v in (d_x_given_ab, d_ab, d_x_rel)]
    for v, hi, name in zip(vals, (1, 2, 1), ("d_x_given_ab", "d_ab", "d_x_rel")):
        if not 0 <= v <= hi:
            raise RangeError(f"{name}={v} outside [0, {hi}]")
    return vals[0] + min(vals[1], vals[2])


def prop12_margin(d, s) -> Fraction:
    """``(2 - 2s) - (min(1 + d, 2) - (s + min(d, s)))``."""
    d, s = q(d), q(s)
    if not (0 <= d <= 2 and 0 < s <= 1):
        raise RangeError("need d in [0, 2] and s in (0, 1]")
    return (2 - 2 * s) - (min(1 + d, Q(2)) - (s + min(d, s)))
