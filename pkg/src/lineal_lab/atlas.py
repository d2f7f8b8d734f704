"""Closed-form dimension bounds and the three-case sweep for the Furstenberg corollary.

Every formula is evaluated in exact rationals.  ``direction`` says how the
value bounds its quantity: ``upper`` (quantity <= value), ``lower``
(quantity >= value) or ``equality``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import ConfigError, RangeError

Q = Fraction


@dataclass(frozen=True)
class Param:
    name: str
    lo: Fraction
    hi: Fraction
    lo_open: bool = False

    def check(self, v: Fraction) -> None:
        low_ok = v > self.lo if self.lo_open else v >= self.lo
        if not (low_ok and v <= self.hi):
            bracket = "(" if self.lo_open else "["
            raise RangeError(f"{self.name}={v} outside {bracket}{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class BoundFormula:
    id: str
    params: tuple[Param, ...]
    evaluator: Callable = field(repr=False)
    direction: str
    quantity: str
    citation: str

    @property
    def arity(self) -> int:
        return len(self.params)

    def __call__(self, **values) -> Fraction:
        names = [p.name for p in self.params]
        if sorted(values) != sorted(names):
            raise ConfigError(f"{self.id} takes parameters {names}, got {sorted(values)}")
        args = []
        for p in self.params:
            v = _exact(values[p.name])
            p.check(v)
            args.append(v)
        return self.evaluator(*args)


def _exact(v) -> Fraction:
    if isinstance(v, float):
        return Q(str(v))
    return Q(v)


UNIT = Param("s", Q(0), Q(1), lo_open=True)


def _p(name, lo, hi, lo_open=False):
    return Param(name, Q(lo), Q(hi), lo_open)


FORMULAS: dict[str, BoundFormula] = {}


def _register(f: BoundFormula) -> None:
    FORMULAS[f.id] = f


_register(BoundFormula(
    "prop12", (_p("hdim_E", 0, 2), UNIT),
    lambda h, s: h + 2 - 2 * s, "upper", "hdim L_s^H(E)",
    "s-Hausdorff extension bound in the plane (union of s-dimensional line subsets)"))
_register(BoundFormula(
    "falconer_mattila", (_p("t", 0, 2),),
    lambda t: min(t + 1, Q(2)), "equality", "hdim L_s^H(E) for a maximal t-dimensional family",
    "Falconer-Mattila strong Marstrand theorem, special case for line families"))
_register(BoundFormula(
    "ren_wang", (UNIT, _p("t", 0, 2)),
    lambda s, t: min(s + t, (3 * s + t) / 2, s + 1), "lower", "hdim E of an (s,t)-Furstenberg set",
    "Ren-Wang resolution of the planar Furstenberg set conjecture"))
_register(BoundFormula(
    "ren_wang_cor", (_p("hdim_E", 0, 2), UNIT),
    lambda h, s: max(h + 1 - s, 2 * h + 1 - 3 * s), "upper", "hdim L_s^H(E), E Borel",
    "Furstenberg strengthening of the s-Hausdorff extension bound"))
_register(BoundFormula(
    "doubling_h", (_p("hdim_E", 0, 2), _p("pdim_E", 0, 2)),
    lambda h, p: h + p - 1, "upper", "hdim L(E)",
    "doubling bound for lineal extensions, Hausdorff form"))
_register(BoundFormula(
    "doubling_p", (_p("pdim_E", 0, 2),),
    lambda p: 2 * p - 1, "upper", "pdim L(E)",
    "doubling bound for lineal extensions, packing form"))
_register(BoundFormula(
    "kakeya_sum", (_p("n", 2, 64),),
    lambda n: n, "lower", "hdim K + pdim K for a Besicovitch set K in R^n",
    "Besicovitch bound obtained through line segment extension"))
_register(BoundFormula(
    "gen_kakeya_p", (_p("pdim_D", 0, 1),),
    lambda d: d + 1, "lower", "pdim E containing segments in a direction set D",
    "generalized Kakeya bound, packing form"))
_register(BoundFormula(
    "two_point", (_p("hdim_E", 0, 2), _p("pdim_E", 0, 2)),
    lambda h, p: h + p + 1, "upper", "hdim L_0(E)",
    "two-point extension bound, Hausdorff form"))
_register(BoundFormula(
    "two_point_p", (_p("pdim_E", 0, 2),),
    lambda p: 2 * p + 1, "upper", "pdim L_0(E)",
    "two-point extension bound, packing form"))


def eval_bound(formula_id: str, params: dict | None = None, **kw) -> Fraction:
    if formula_id not in FORMULAS:
        raise ConfigError(f"unknown formula {formula_id!r}; known: {sorted(FORMULAS)}")
    values = dict(params or {}, **kw)
    return FORMULAS[formula_id](**values)


def holds(formula_id: str, quantity, params: dict | None = None, slack=0, **kw) -> bool:
    """Does ``quantity`` satisfy the formula's one-sided bound (up to ``slack``)?"""
    f = FORMULAS[formula_id]
    v = eval_bound(formula_id, params, **kw)
    quantity, slack = _exact(quantity), _exact(slack)
    if f.direction == "upper":
        return quantity <= v + slack
    if f.direction == "lower":
        return quantity >= v - slack
    return abs(quantity - v) <= slack


# ---------------------------------------------------------------------------
# three-case sweep
# ---------------------------------------------------------------------------

CASES = ("s+t>=2", "s+t<2, s<=t", "t<s")


def case_of(s: Fraction, t: Fraction) -> str:
    if s + t >= 2:
        return CASES[0]
    return CASES[1] if s <= t else CASES[2]


def ren_wang_margin(s: Fraction, t: Fraction) -> tuple[Fraction, Fraction]:
    """Margins of the corollary at ``(s, t)``: overall and first branch alone."""
    e_lb = eval_bound("ren_wang", s=s, t=t)
    ext = eval_bound("falconer_mattila", t=t)
    first = e_lb + 1 - s
    return max(first, 2 * e_lb + 1 - 3 * s) - ext, first - ext


@dataclass
class CorollaryReport:
    step: Fraction
    points: int = 0
    violations: int = 0
    worst: dict = field(default_factory=dict)  # case -> (margin, s, t)
    counts: dict = field(default_factory=dict)
    first_branch_equalities: int = 0
    max_jump: Fraction = Q(0)
    jump_bound: Fraction = Q(0)

    @property
    def continuous(self) -> bool:
        return self.max_jump <= self.jump_bound

    @property
    def equality_on_t_lt_s(self) -> bool:
        """Every ``t < s`` point attains equality in the first branch."""
        return self.counts.get(CASES[2], 0) > 0 and self.first_branch_equalities == self.counts[CASES[2]]

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.continuous and self.equality_on_t_lt_s

    def to_text(self) -> str:
        out = [f"grid_step: {self.step}", f"points: {self.points}", f"violations: {self.violations}"]
        for c in CASES:
            m, s, t = self.worst[c]
            out.append(f"case[{c}]: points={self.counts[c]} worst_margin={m} at s={s} t={t}")
        out += [
            f"t<s first-branch equalities: {self.first_branch_equalities}/{self.counts.get(CASES[2], 0)}",
            f"max adjacent jump: {self.max_jump} (bound {self.jump_bound})",
            f"verdict: {'PASS' if self.passed else 'FAIL'}",
        ]
        return "\n".join(out) + "\n"


def verify_ren_wang_cor(grid_step="1/100") -> CorollaryReport:
    """Sweep ``s`` over ``(0, 1]`` and ``t`` over ``[0, 2]`` on an exact grid."""
    step = _exact(grid_step)
    if not 0 < step <= Q(1, 10):
        raise RangeError("grid step must lie in (0, 1/10]")
    ns, nt = int(1 / step), int(2 / step)
    rep = CorollaryReport(step, jump_bound=4 * step)
    rep.worst = {c: (None, None, None) for c in CASES}
    rep.counts = {c: 0 for c in CASES}
    prev_row = None
    for i in range(1, ns + 1):
        s = i * step
        row = []
        for k in range(nt + 1):
            t = k * step
            m, first = ren_wang_margin(s, t)
            c = case_of(s, t)
            rep.points += 1
            rep.counts[c] += 1
            rep.violations += m < 0
            if rep.worst[c][0] is None or m < rep.worst[c][0]:
                rep.worst[c] = (m, s, t)
            if c == CASES[2] and first == 0:
                rep.first_branch_equalities += 1
            if row:
                rep.max_jump = max(rep.max_jump, abs(m - row[-1]))
            if prev_row is not None:
                rep.max_jump = max(rep.max_jump, abs(m - prev_row[k]))
            row.append(m)
        prev_row = row
    return rep
