"""Brute-force reference implementations used only by the tests.

Each one is deliberately naive and shares no code with the package.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def halfopen_cells(a, b, x0, x1, j, vertical=False):
    """Cells owning some point of the segment, via exhaustive candidate points.

    Along the segment the owning cell is piecewise constant, changing only at
    grid crossings; testing every crossing and every midpoint between
    consecutive crossings visits every owner.
    """
    side = 1 << j
    a, b, x0, x1 = (Fraction(v) for v in (a, b, x0, x1))
    if vertical:
        # x = b fixed, parameter runs over y
        ts = {x0, x1} | {Fraction(k, side) for k in range(side + 1)}
        point = lambda t: (b, t)  # noqa: E731
    else:
        ts = {x0, x1} | {Fraction(i, side) for i in range(side + 1)}
        if a != 0:
            ts |= {(Fraction(k, side) - b) / a for k in range(side + 1)}
        point = lambda t: (t, a * t + b)  # noqa: E731
    ts = sorted(t for t in ts if x0 <= t <= x1)
    cands = list(ts) + [(p + q) / 2 for p, q in zip(ts, ts[1:])]
    out = set()
    for t in cands:
        x, y = point(t)
        i, k = math.floor(x * side), math.floor(y * side)
        if 0 <= i < side and 0 <= k < side:
            out.add((i, k))
    return out


def closed_cells(a, b, x0, x1, j, vertical=False):
    """Closed squares meeting the segment, by corner signs of ``a x + b - y``.

    The square is first clipped to the segment's parameter window; the line
    meets the clipped rectangle exactly when the four corner values are not
    all of one strict sign.
    """
    side = 1 << j
    a, b, x0, x1 = (Fraction(v) for v in (a, b, x0, x1))
    if vertical:
        cols = [i for i in range(side) if Fraction(i, side) <= b <= Fraction(i + 1, side)]
        rows = [k for k in range(side) if Fraction(k, side) <= x1 and x0 <= Fraction(k + 1, side)]
        return {(i, k) for i in cols for k in rows}
    # integer form: scale so every coordinate is an integer
    den = math.lcm(a.denominator, b.denominator, x0.denominator, x1.denominator) * side
    A, B = int(a * den), int(b * den)
    lo_w, hi_w = int(x0 * den), int(x1 * den)
    g = den // side
    out = set()
    ii = np.arange(side, dtype=object)
    xl = np.maximum(ii * g, lo_w)
    xr = np.minimum((ii + 1) * g, hi_w)
    for i in range(side):
        if xl[i] > xr[i]:
            continue
        # f * den^2 / den = A x + B den - y den, with x, y in units of 1/den
        fx = [A * xl[i] + B * den, A * xr[i] + B * den]
        for k in range(side):
            ys = (k * g * den, (k + 1) * g * den)
            vals = [v - y for v in fx for y in ys]
            if not (all(v > 0 for v in vals) or all(v < 0 for v in vals)):
                out.add((i, k))
    return out


def closed_cells_fast(a, b, x0, x1, j):
    """Vectorised corner-sign oracle for non-vertical lines (int64, exact)."""
    side = 1 << j
    a, b, x0, x1 = (Fraction(v) for v in (a, b, x0, x1))
    den = math.lcm(a.denominator, b.denominator, x0.denominator, x1.denominator) * side
    A, B = int(a * den), int(b * den)
    lo_w, hi_w = int(x0 * den), int(x1 * den)
    g = den // side
    assert abs(A) * den * 4 + abs(B) * den < 2 ** 62, "oracle needs smaller denominators"
    ii = np.arange(side, dtype=np.int64)
    xl = np.maximum(ii * g, lo_w)
    xr = np.minimum((ii + 1) * g, hi_w)
    ok_col = xl <= xr
    f_l = A * xl + B * den
    f_r = A * xr + B * den
    kk = np.arange(side, dtype=np.int64)
    y_lo = kk * g * den
    y_hi = (kk + 1) * g * den
    corners = np.stack([f_l[:, None] - y_lo[None, :], f_l[:, None] - y_hi[None, :],
                        f_r[:, None] - y_lo[None, :], f_r[:, None] - y_hi[None, :]])
    hit = ~((corners > 0).all(axis=0) | (corners < 0).all(axis=0)) & ok_col[:, None]
    i, k = np.nonzero(hit)
    return set(zip(i.tolist(), k.tolist()))


def cantor_interval_ends(alpha, k):
    """Left ends and common length of the generation-``k`` intervals, by recursion."""
    alpha = Fraction(alpha)
    ends, length = [Fraction(0)], Fraction(1)
    for _ in range(k):
        child = length * (1 - alpha) / 2
        ends = [e for left in ends for e in (left, left + length - child)]
        length = child
    return ends, length


def free_count(boundaries, free_parity, j):
    """Number of positions p in [1, j] whose block is free, counted one by one."""
    want = 1 if free_parity == "odd" else 0
    total = 0
    for p in range(1, j + 1):
        idx = sum(1 for bd in boundaries[1:] if bd <= p)
        total += idx % 2 == want
    return total


def piecewise_eval(points, t):
    """Linear interpolation through sorted ``points`` with plain Fractions."""
    t = Fraction(t)
    for (r0, v0), (r1, v1) in zip(points, points[1:]):
        if r0 <= t <= r1:
            return Fraction(v0) + (Fraction(v1) - Fraction(v0)) * (t - r0) / (Fraction(r1) - r0)
    raise ValueError("t outside the profile")


def piecewise_eval_many(points, t_num, t_den):
    """Exact interpolation at ``t_num / t_den`` as (numerator, denominator) object arrays.

    Everything is scaled to one common denominator so positions stay int64 and
    only the value products need Python ints.
    """
    L = math.lcm(t_den, *(Fraction(x).denominator for x, _ in points), *(Fraction(y).denominator for _, y in points))
    X = np.array([int(Fraction(x) * L) for x, _ in points], dtype=np.int64)
    assert X[-1] < 2 ** 40
    Y = np.array([int(Fraction(y) * L) for _, y in points], dtype=object)
    T = np.asarray(t_num, dtype=np.int64) * (L // t_den)
    i = np.clip(np.searchsorted(X, T, side="right") - 1, 0, len(X) - 2)
    x0, x1 = X[i].astype(object), X[i + 1].astype(object)
    num = Y[i] * (x1 - x0) + (Y[i + 1] - Y[i]) * (T.astype(object) - x0)
    return num, L * (x1 - x0)
