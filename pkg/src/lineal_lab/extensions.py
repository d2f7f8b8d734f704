"""Line extension operators and direction sets.

Each operator produces a family of full lines (windows widened to [0, 1])
and the union of those lines at a working level.  Small unions are
rasterized exactly; large ones fall back to the line-union counter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dyadic import (
    EMPTY,
    MAX_CELLS,
    DyadicSet,
    FamilyBacked,
    LineFamily,
    LineSpec,
    box_count,
    floor_scaled,
    rasterize_family,
    slice_set,
)
from .errors import ConfigError

CHART_LO, CHART_HI = -2, 2
THRESHOLD_SLACK = 0.05


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """Slopes of a family on the chart ``u = (a + 2) / 4``.

    ``overflow`` holds (numerator, denominator) rows of slopes outside
    ``[-2, 2)``; vertical lines are only counted.
    """

    set: DyadicSet
    vertical_count: int
    overflow: np.ndarray

    @property
    def is_empty(self) -> bool:
        return self.set.count() == 0 and self.vertical_count == 0


@dataclass(frozen=True, eq=False)
class ExtensionResult:
    extended_set: DyadicSet
    family: LineFamily
    direction_set: DirectionSet


def direction_set(family: LineFamily, j: int) -> DirectionSet:
    num, den = family.slopes()
    # u * 2^j = (a + 2) 2^j / 4 = (num + 2 den) 2^j / (4 den)
    shifted = num + 2 * den
    inside = (shifted >= 0) & (num < 2 * den)
    cells = floor_scaled(shifted[inside], 4 * den[inside], j)
    overflow = np.column_stack([num[~inside], den[~inside]])
    vert = int(family.vertical_mask.sum())
    return DirectionSet(DyadicSet.from_keys(1, j, cells), vert, overflow)


def _extend(family: LineFamily, j: int, backing: str) -> ExtensionResult:
    full = family.with_window(0, 1)
    if backing not in ("auto", "explicit", "family"):
        raise ConfigError(f"unknown backing {backing!r}")
    if backing == "auto":
        backing = "explicit" if len(full) * (2 << j) <= MAX_CELLS else "family"
    if backing == "explicit":
        ext = rasterize_family(full, j)
    else:
        ext = DyadicSet(2, j, FamilyBacked(family=full))
    return ExtensionResult(ext, full, direction_set(full, j))


def lineal_extension(segments: LineFamily, j: int, backing: str = "auto") -> ExtensionResult:
    """Widen every segment to its full line over [0, 1]."""
    return _extend(segments, j, backing)


def _pair_lines(coords: np.ndarray, level: int, pair_cap: int) -> LineFamily:
    m = coords.shape[0]
    stride = 1
    while math.ceil(m / stride) * (math.ceil(m / stride) - 1) // 2 > pair_cap:
        stride += 1
    pts = coords[::stride]
    m = pts.shape[0]
    if m < 2:
        return LineFamily()
    i1, i2 = np.triu_indices(m, k=1)
    x1, y1 = pts[i1, 0], pts[i1, 1]
    x2, y2 = pts[i2, 0], pts[i2, 1]
    dx, dy = x2 - x1, y2 - y1
    vertical = dx == 0
    safe_dx = np.where(vertical, 1, dx)
    # centres are (2x + 1, 2y + 1) / 2^(level + 1)
    b_num = np.where(vertical, 2 * x1 + 1, (2 * y1 + 1) * safe_dx - dy * (2 * x1 + 1))
    b_den = np.where(vertical, 1, safe_dx) << (level + 1)
    a_num = np.where(vertical, 0, dy)
    a_den = safe_dx
    return LineFamily.from_arrays(a_num, a_den, b_num, b_den, vertical=vertical.astype(np.int64))


def two_point_extension(source: DyadicSet, j: int | None = None, pair_cap: int = 1 << 20,
                        backing: str = "auto") -> ExtensionResult:
    """Lines through every pair of distinct cell centres of the set.

    Above ``pair_cap`` pairs the cells are thinned with a fixed stride in key
    order before pairing.
    """
    if source.n != 2:
        raise ConfigError("two-point extension needs a planar set")
    j = source.level if j is None else j
    fam = _pair_lines(source.coords(), source.level, pair_cap)
    return _extend(fam, j, backing)


def slice_lower_box(source: DyadicSet, line: LineSpec, levels) -> float:
    """Minimum of ``log2 N / j`` of the slice over the given levels."""
    worst = math.inf
    for lv in levels:
        c = box_count(slice_set(source, line, lv), lv) if lv else EMPTY
        worst = min(worst, c / lv)
    return worst


def s_hausdorff_extension(source: DyadicSet, s: float, candidates: LineFamily, j: int,
                          window_levels: tuple[int, int], slack: float = THRESHOLD_SLACK,
                          backing: str = "auto") -> ExtensionResult:
    """Keep candidate lines whose slice has lower-box estimate at least ``s - slack``."""
    if not 0 < s <= 1:
        raise ConfigError("s must lie in (0, 1]")
    j0, j1 = window_levels
    if j1 - j0 + 1 < 4 or j0 < 1:
        raise ConfigError("the slice window needs at least 4 levels starting at 1 or later")
    levels = range(j0, j1 + 1)
    keep = np.array([slice_lower_box(source, ln, levels) >= s - slack for ln in candidates], dtype=bool)
    return _extend(candidates.subset(keep), j, backing)
