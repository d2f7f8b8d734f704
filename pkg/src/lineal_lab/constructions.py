"""Explicit fractal sets and digit-coding constructions.

Covers the middle-alpha Cantor set and its two-fiber planar embedding, the
digit sets with complementary block schedules and their product graph, the
factorial block split of a bit string, and a literal block encoding with its
decoder.
"""

from __future__ import annotations

import math
from fractions import Fraction
from math import factorial

import numpy as np

from .digits import BitString, DigitRule
from .dyadic import (
    MAX_CELLS,
    DyadicSet,
    FamilyBacked,
    LineFamily,
    as_fraction,
)
from .errors import CapacityError, ConfigError, DecodeError, InconsistencyError

FACTORIAL_HORIZON = 5040


# ---------------------------------------------------------------------------
# Cantor sets
# ---------------------------------------------------------------------------


def cantor_dimension(alpha) -> float:
    alpha = as_fraction(alpha)
    return math.log(0.5) / math.log((1 - alpha) / 2)


def cantor_level(alpha, k: int) -> int:
    """Finest level whose cells are no longer than a generation-``k`` interval."""
    alpha = as_fraction(alpha)
    ratio = (1 - alpha) / 2
    j = 0
    while Fraction(1, 1 << j) > ratio ** k:
        j += 1
    return j


def cantor_intervals(alpha, k: int) -> tuple[list[int], int, int]:
    """Left endpoints of the generation-``k`` intervals.

    Returns ``(lefts, width, denom)``: interval ``i`` is
    ``[lefts[i] / denom, (lefts[i] + width) / denom]``.
    """
    alpha = as_fraction(alpha)
    if not Fraction(1, 2) <= alpha < 1:
        raise ConfigError("alpha must lie in [1/2, 1)")
    if k < 0:
        raise ConfigError("negative depth")
    if k > 24:
        raise CapacityError("more than 2^24 generation intervals")
    p, q = alpha.numerator, alpha.denominator
    lefts = np.zeros(1, dtype=object)
    for g in range(k):
        jump = (q + p) * (q - p) ** g
        base = lefts * (2 * q)
        lefts = np.concatenate([base, base + jump])
    return sorted(int(v) for v in lefts), (q - p) ** k, (2 * q) ** k


def cantor(alpha, k: int, level: int | None = None) -> tuple[DyadicSet, float]:
    """Generation-``k`` middle-alpha Cantor set as a 1-dim explicit set.

    Each generation interval is covered by the level cells meeting its
    interior.  The default level is :func:`cantor_level`, where a dyadic
    contraction ratio gives exactly ``2^k`` cells.
    """
    lefts, width, denom = cantor_intervals(alpha, k)
    j = cantor_level(alpha, k) if level is None else level
    side = 1 << j
    starts = [(L * side) // denom for L in lefts]
    stops = [-((-(L + width) * side) // denom) for L in lefts]  # exclusive
    total = sum(b - a for a, b in zip(starts, stops))
    if total > MAX_CELLS:
        raise CapacityError(f"cantor cover has {total} cells")
    cells = np.concatenate([np.arange(a, b, dtype=np.int64) for a, b in zip(starts, stops)])
    return DyadicSet.from_keys(1, j, cells), cantor_dimension(alpha)


# ---------------------------------------------------------------------------
# digit sets
# ---------------------------------------------------------------------------


def digit_set(rule: DigitRule, j: int) -> DyadicSet:
    return DyadicSet.digits([rule], j)


def _check_disjoint(rule_x: DigitRule, rule_s: DigitRule, j: int) -> None:
    if rule_x.mask(j) & rule_s.mask(j):
        raise ConfigError("digit rules must have disjoint free blocks")


def graph_set(rule_x: DigitRule, rule_s: DigitRule, j: int) -> DyadicSet:
    """Cells of ``{(x, a x)}`` over level-``j`` representatives of both digit sets."""
    _check_disjoint(rule_x, rule_s, j)
    xs = DyadicSet.digits([rule_x], j).keys()
    ss = DyadicSet.digits([rule_s], j).keys()
    if xs.size * ss.size > MAX_CELLS:
        raise CapacityError("too many (x, a) pairs to enumerate")
    if j > 31:
        raise CapacityError("graph enumeration is limited to j <= 31")
    prod = np.multiply.outer(xs, ss).ravel()  # (x * a) * 4^j, below 2^62
    ys = prod >> j
    keys = (np.repeat(xs, ss.size) << j) | ys
    return DyadicSet.from_keys(2, j, keys)


def graph_chart(rule_x: DigitRule, rule_s: DigitRule, j: int) -> DyadicSet:
    """Symbolic stand-in for the graph set in the ``(x, a)`` chart.

    With disjoint digit supports the map ``(x, a) -> (x, a x)`` keeps the
    cell count within a couple of bits, so the product digit set carries the
    count ``free_x(j) + free_s(j)`` at any working level.
    """
    _check_disjoint(rule_x, rule_s, min(j, rule_x.horizon, rule_s.horizon))
    return DyadicSet.digits([rule_x, rule_s], j)


def slope_pencil(rule_s: DigitRule, j: int, intercept=0) -> DyadicSet:
    """Family-backed union of the full lines ``y = a x + b`` over the digit set of slopes."""
    slopes = DyadicSet.digits([rule_s], j)
    return DyadicSet(2, j, FamilyBacked(slope_set=slopes, intercept=as_fraction(intercept)))


def recover_pair(total: BitString, rule_x: DigitRule, rule_s: DigitRule) -> tuple[BitString, BitString]:
    """Split a carry-free sum back into its two digit-set summands."""
    n = total.length
    mx, ms = rule_x.mask(n), rule_s.mask(n)
    if mx & ms:
        raise ConfigError("digit rules must have disjoint free blocks")
    stray = total.value & ~(mx | ms)
    if stray:
        raise InconsistencyError("sum has a nonzero digit where both rules are zero")
    return total.masked(mx), total.masked(ms)


# ---------------------------------------------------------------------------
# factorial split
# ---------------------------------------------------------------------------


def factorial_rule(horizon: int = FACTORIAL_HORIZON, free_parity: str = "odd") -> DigitRule:
    """Blocks ``[j!, (j+1)!)`` for ``j >= 1``; block index ``i`` is ``j - 1``.

    The default parity frees the even-``j`` blocks.
    """
    b, j = [1], 2
    while b[-1] <= horizon:
        b.append(factorial(j))
        j += 1
    return DigitRule(tuple(b), free_parity, horizon)


def split_dim_zero(z: BitString, horizon: int = FACTORIAL_HORIZON) -> tuple[BitString, BitString]:
    """``z = x + y`` with ``x`` on the even-``j`` factorial blocks and ``y`` on the rest."""
    if z.length > horizon:
        raise ConfigError(f"bit string longer than the factorial horizon {horizon}")
    x = z.masked(factorial_rule(max(horizon, 1)).mask(z.length))
    return x, BitString(z.length, z.value - x.value)


# ---------------------------------------------------------------------------
# literal block encoding
# ---------------------------------------------------------------------------


def assist_lengths(delta, total: int) -> tuple[int, ...]:
    """Block lengths ``ceil((1+delta)^i)``, ``i = 0, 1, ...``, until they cover ``total`` bits."""
    delta = as_fraction(delta)
    if not 0 < delta <= 1:
        raise ConfigError("delta must lie in (0, 1]")
    base = 1 + delta
    lengths, covered, power = [], 0, Fraction(1)
    while covered < total:
        n = math.ceil(power)
        lengths.append(n)
        covered += n
        power *= base
    return tuple(lengths)


def encode_assist(y: BitString, delta) -> tuple[BitString, tuple[int, ...]]:
    """Concatenate the literal digit blocks of ``y`` along the growing schedule."""
    schedule = assist_lengths(delta, y.length)
    pieces, start = [], 1
    for n in schedule:
        pieces.append(y.slice(start, start + n))
        start += n
    x = BitString(0, 0)
    for sigma in pieces:
        x = x.concat(sigma)
    return x, schedule


def decode_assist(x: BitString, schedule, target_len: int) -> BitString:
    """Rebuild ``y`` block by block, each block extending the prefix so far."""
    schedule = tuple(int(n) for n in schedule)
    if x.length != target_len:
        raise DecodeError(f"encoded length {x.length} differs from target {target_len}")
    if any(n < 1 for n in schedule):
        raise DecodeError("block lengths must be positive")
    full = sum(schedule)
    if full < target_len or (schedule and full - schedule[-1] >= target_len):
        raise DecodeError("schedule does not end in the block holding the last bit")
    prefix, start = BitString(0, 0), 1
    for n in schedule:
        prefix = prefix.concat(x.slice(start, start + n))
        start += n
    return prefix


# ---------------------------------------------------------------------------
# two-fiber example
# ---------------------------------------------------------------------------


def two_point_example(alpha, t, k: int) -> tuple[DyadicSet, LineFamily]:
    """Two Cantor fibers and every line through one cell centre on each.

    The picture is scaled by 1/4 to fit the unit square: fibers sit at
    ``x = 0`` and ``x = 1/4`` and carry ``C/4`` and ``tC/4``.  Slopes are
    unchanged by the scaling, so the family's slopes are ``t c2 - c1`` for
    cell centres ``c1, c2`` of the level-``J`` cover of ``C``.
    """
    t = as_fraction(t)
    if not 1 <= t <= 2:
        raise ConfigError("t must lie in [1, 2]")
    if not (t.denominator & (t.denominator - 1)) == 0:
        raise ConfigError("t must be a dyadic rational")
    base, _ = cantor(alpha, k)
    J = base.level
    level = J + 2
    if level > 31:
        raise CapacityError("two-fiber set too fine for planar storage")
    idx = base.keys()
    if idx.size * idx.size > MAX_CELLS:
        raise CapacityError("pair count exceeds the cell cap")
    tn, td = t.numerator, t.denominator
    odd = 2 * idx + 1  # centre = odd / 2^(J+1)
    # scaled second fiber: y * 2^level = t * odd / 2
    rows2 = (tn * odd) // (2 * td)
    fib1 = np.column_stack([np.zeros_like(idx), idx])
    fib2 = np.column_stack([np.full_like(idx, 1 << J), rows2])
    fibers = DyadicSet.from_coords(2, level, np.vstack([fib1, fib2]))
    c1 = np.repeat(odd, odd.size)
    c2 = np.tile(odd, odd.size)
    # slope = (t c2 - c1) = (tn c2 - td c1) / (td 2^(J+1)); intercept c1 / 4
    a_num = tn * c2 - td * c1
    a_den = np.full(a_num.size, td << (J + 1), dtype=np.int64)
    b_num = c1
    b_den = np.full(c1.size, 1 << (J + 3), dtype=np.int64)
    fam = LineFamily.from_arrays(a_num, a_den, b_num, b_den)
    return fibers, fam


def fiber_set(s: DyadicSet, column: int) -> DyadicSet:
    """Rows of the cells of a planar set in one column, as a 1-dim set."""
    c = s.coords()
    return DyadicSet.from_keys(1, s.level, c[c[:, 0] == column, 1])


def random_dyadic_t(rng: np.random.Generator, bits: int = 16) -> Fraction:
    """Uniform dyadic rational in [1, 2] with the given number of binary digits."""
    return 1 + Fraction(int(rng.integers(0, (1 << bits) + 1)), 1 << bits)


__all__ = [
    "assist_lengths",
    "cantor",
    "cantor_dimension",
    "cantor_intervals",
    "cantor_level",
    "decode_assist",
    "digit_set",
    "encode_assist",
    "factorial_rule",
    "fiber_set",
    "graph_chart",
    "graph_set",
    "random_dyadic_t",
    "recover_pair",
    "slope_pencil",
    "split_dim_zero",
    "two_point_example",
]
