"""Dyadic grids: cells, sets with three backings, exact line rasterization, box counts.

A level-``j`` cell with integer coordinates ``(k_1, ..., k_n)`` is the
half-open cube ``prod [k_i 2^-j, (k_i + 1) 2^-j)``.  Explicit sets store their
cells as sorted unique int64 keys: ``x`` in one dimension, ``(x << j) | y`` in
two, so key order is lexicographic cell order.

Every geometric computation here is integer or exact-rational; floats only
appear as the log2 of a count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .digits import DigitRule
from .errors import CapacityError, ConfigError, ResolutionError

MAX_CELLS = 1 << 24
EMPTY = float("-inf")  # log2 of an empty count
_MAX_LEVEL = {1: 62, 2: 31}
_I64_SAFE = 1 << 62

RationalLike = Union[int, str, Fraction]


def as_fraction(v: RationalLike) -> Fraction:
    if isinstance(v, float):
        raise ConfigError(f"floats are not accepted as exact parameters: {v!r}")
    return Fraction(v)


def is_dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


def _floor_div(num, den):
    return num // den


def _ceil_div(num, den):
    return -((-num) // den)


def floor_scaled(num: np.ndarray, den: np.ndarray, j: int) -> np.ndarray:
    """``floor(num * 2^j / den)`` elementwise, exact even past int64 range."""
    num = np.asarray(num, dtype=np.int64)
    den = np.asarray(den, dtype=np.int64)
    if num.size == 0:
        return num.copy()
    if int(np.abs(num).max()) < (_I64_SAFE >> j):
        return (num << j) // den
    big = np.array([(int(a) << j) // int(d) for a, d in zip(num, den)], dtype=object)
    if big.size and (big.max() >= _I64_SAFE or big.min() <= -_I64_SAFE):
        raise ResolutionError("scaled values exceed the int64 range")
    return big.astype(np.int64)


# ---------------------------------------------------------------------------
# cells and lines
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DyadicCell:
    level: int
    coords: tuple[int, ...]

    def __post_init__(self):
        if self.level < 0:
            raise ConfigError("negative level")
        side = 1 << self.level
        if any(not 0 <= c < side for c in self.coords):
            raise ConfigError(f"cell {self.coords} outside level {self.level} grid")

    def ancestor(self, level: int) -> "DyadicCell":
        if level > self.level:
            raise ResolutionError("ancestor level finer than the cell")
        shift = self.level - level
        return DyadicCell(level, tuple(c >> shift for c in self.coords))

    def contains(self, point: Sequence[Fraction]) -> bool:
        side = 1 << self.level
        return all(c <= p * side < c + 1 for c, p in zip(self.coords, point))


@dataclass(frozen=True)
class LineSpec:
    """A segment of a planar line.

    Non-vertical: ``y = a x + b`` for ``x`` in the closed window ``[x0, x1]``.
    Vertical: ``x = b`` for ``y`` in ``[x0, x1]`` (``a`` is ignored and kept 0).
    Parameters are exact rationals; dyadic ones are the common case.
    """

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    x0: Fraction = Fraction(0)
    x1: Fraction = Fraction(1)
    vertical: bool = False

    def __post_init__(self):
        for name in ("a", "b", "x0", "x1"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.vertical and self.a != 0:
            object.__setattr__(self, "a", Fraction(0))
        if self.x0 > self.x1:
            raise ConfigError("line window must be nonempty")

    @classmethod
    def through(cls, p: Sequence[RationalLike], q: Sequence[RationalLike],
                x0: RationalLike = 0, x1: RationalLike = 1) -> "LineSpec":
        (px, py), (qx, qy) = [tuple(map(as_fraction, p)), tuple(map(as_fraction, q))]
        if px == qx:
            if py == qy:
                raise ConfigError("two distinct points are needed")
            return cls(0, px, x0, x1, vertical=True)
        a = (qy - py) / (qx - px)
        return cls(a, py - a * px, x0, x1)

    @property
    def is_dyadic(self) -> bool:
        return all(is_dyadic(v) for v in (self.a, self.b, self.x0, self.x1))

    def with_window(self, x0: RationalLike = 0, x1: RationalLike = 1) -> "LineSpec":
        return LineSpec(self.a, self.b, x0, x1, self.vertical)

    def point(self, t: Fraction) -> tuple[Fraction, Fraction]:
        return (self.b, t) if self.vertical else (t, self.a * t + self.b)

    def to_record(self) -> str:
        def q(v: Fraction) -> str:
            return f"{v.numerator}/{v.denominator}"

        if self.vertical:
            return f"vertical {q(self.b)} {q(self.x0)} {q(self.x1)}"
        return f"{q(self.a)} {q(self.b)} {q(self.x0)} {q(self.x1)}"

    @classmethod
    def from_record(cls, text: str) -> "LineSpec":
        parts = text.split()
        if parts and parts[0] == "vertical":
            c, y0, y1 = (Fraction(p) for p in parts[1:4])
            return cls(0, c, y0, y1, vertical=True)
        if len(parts) != 4:
            raise ConfigError(f"bad line record: {text!r}")
        a, b, x0, x1 = (Fraction(p) for p in parts)
        return cls(a, b, x0, x1)


_FAMILY_COLS = 9  # vertical, a, b, x0, x1 as (num, den) pairs


class LineFamily:
    """An immutable, deduplicated finite set of lines.

    Lines live in an int64 table (one row per line, reduced fractions), which
    keeps million-line families cheap.  Iteration yields :class:`LineSpec`.
    """

    __slots__ = ("_rows", "_max_window")

    def __init__(self, lines: Iterable[LineSpec] = ()):
        rows = []
        for ln in lines:
            vals = (ln.a, ln.b, ln.x0, ln.x1)
            row = [int(ln.vertical)]
            for v in vals:
                row += [v.numerator, v.denominator]
            if any(abs(x) >= _I64_SAFE for x in row):
                raise ConfigError("line parameters too large for the family table")
            rows.append(row)
        table = np.array(rows, dtype=np.int64).reshape(-1, _FAMILY_COLS)
        self._rows = _unique_rows(table)

    @classmethod
    def _from_table(cls, table: np.ndarray) -> "LineFamily":
        fam = cls.__new__(cls)
        fam._rows = _unique_rows(table)
        return fam

    @classmethod
    def from_arrays(cls, a_num, a_den, b_num, b_den, *, vertical=None,
                    x0: RationalLike = 0, x1: RationalLike = 1) -> "LineFamily":
        """Build from numerator/denominator arrays (reduced here)."""
        a_num, a_den, b_num, b_den = (np.asarray(v, dtype=np.int64) for v in (a_num, a_den, b_num, b_den))
        m = a_num.shape[0]
        vert = np.zeros(m, dtype=np.int64) if vertical is None else np.asarray(vertical, dtype=np.int64)
        a_num, a_den = _reduce(np.where(vert == 1, 0, a_num), np.where(vert == 1, 1, a_den))
        b_num, b_den = _reduce(b_num, b_den)
        x0, x1 = as_fraction(x0), as_fraction(x1)
        table = np.column_stack([
            vert, a_num, a_den, b_num, b_den,
            np.full(m, x0.numerator), np.full(m, x0.denominator),
            np.full(m, x1.numerator), np.full(m, x1.denominator),
        ]).astype(np.int64)
        return cls._from_table(table)

    def __len__(self) -> int:
        return self._rows.shape[0]

    def __iter__(self) -> Iterator[LineSpec]:
        for i in range(len(self)):
            yield self[i]

    def __getitem__(self, i: int) -> LineSpec:
        r = [int(v) for v in self._rows[i]]
        return LineSpec(Fraction(r[1], r[2]), Fraction(r[3], r[4]),
                        Fraction(r[5], r[6]), Fraction(r[7], r[8]), bool(r[0]))

    def __eq__(self, other) -> bool:
        return isinstance(other, LineFamily) and np.array_equal(self._rows, other._rows)

    def __hash__(self):
        return hash(self._rows.tobytes())

    def __repr__(self) -> str:
        return f"LineFamily({len(self)} lines)"

    @property
    def table(self) -> np.ndarray:
        view = self._rows.view()
        view.flags.writeable = False
        return view

    @property
    def vertical_mask(self) -> np.ndarray:
        return self._rows[:, 0] == 1

    def slopes(self) -> tuple[np.ndarray, np.ndarray]:
        """Slope numerators and denominators of the non-vertical lines."""
        nv = ~self.vertical_mask
        return self._rows[nv, 1], self._rows[nv, 2]

    def with_window(self, x0: RationalLike = 0, x1: RationalLike = 1) -> "LineFamily":
        x0, x1 = as_fraction(x0), as_fraction(x1)
        t = self._rows.copy()
        t[:, 5], t[:, 6], t[:, 7], t[:, 8] = x0.numerator, x0.denominator, x1.numerator, x1.denominator
        return LineFamily._from_table(t)

    def union(self, other: "LineFamily") -> "LineFamily":
        return LineFamily._from_table(np.vstack([self._rows, other._rows]))

    def max_window(self) -> Fraction:
        if len(self) == 0:
            return Fraction(0)
        cached = getattr(self, "_max_window", None)
        if cached is None:
            w = np.ascontiguousarray(self._rows[:, 5:9])
            if (w == w[0]).all():
                windows = w[:1]
            else:
                _, idx = np.unique(w.view(np.dtype((np.void, 32))).ravel(), return_index=True)
                windows = w[idx]
            cached = max(Fraction(int(v[2]), int(v[3])) - Fraction(int(v[0]), int(v[1])) for v in windows)
            self._max_window = cached
        return cached

    def subset(self, mask: np.ndarray) -> "LineFamily":
        return LineFamily._from_table(self._rows[np.asarray(mask, dtype=bool)])


def _reduce(num: np.ndarray, den: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    num = np.asarray(num, dtype=np.int64)
    den = np.asarray(den, dtype=np.int64)
    sign = np.where(den < 0, -1, 1)
    num, den = num * sign, den * sign
    g = np.gcd(num, den)
    g = np.where(g == 0, 1, g)
    return num // g, den // g


def _unique_rows(table: np.ndarray) -> np.ndarray:
    if table.shape[0] == 0:
        return table.reshape(0, _FAMILY_COLS)
    # unique over whole rows via a bytes view; the order is canonical, not numeric
    table = np.ascontiguousarray(table, dtype=np.int64)
    rows = table.view(np.dtype((np.void, 8 * _FAMILY_COLS))).ravel()
    _, idx = np.unique(rows, return_index=True)
    return table[idx]


# ---------------------------------------------------------------------------
# sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Explicit:
    keys: np.ndarray  # sorted unique int64


@dataclass(frozen=True)
class DigitBacked:
    rules: tuple[DigitRule, ...]  # one per coordinate


@dataclass(frozen=True, eq=False)
class FamilyBacked:
    """Union of lines, counted by the approximate line-union counter.

    Either ``family`` lists the lines, or ``slope_set`` is a symbolic 1-dim set
    of slopes (read as numbers in [0, 1)) of a pencil ``y = a x + intercept``.
    """

    family: LineFamily | None = None
    slope_set: "DyadicSet | None" = None
    intercept: Fraction = Fraction(0)
    window: tuple[Fraction, Fraction] = (Fraction(0), Fraction(1))


Backing = Union[Explicit, DigitBacked, FamilyBacked]


@dataclass(frozen=True, eq=False)
class DyadicSet:
    n: int
    level: int
    backing: Backing
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ConfigError("set geometry is restricted to n in {1, 2}")
        if self.level < 0:
            raise ConfigError("negative level")
        if isinstance(self.backing, Explicit) and self.level > _MAX_LEVEL[self.n]:
            raise ResolutionError(f"explicit {self.n}-dim sets support levels <= {_MAX_LEVEL[self.n]}")
        if isinstance(self.backing, DigitBacked):
            if len(self.backing.rules) != self.n:
                raise ConfigError("one digit rule per coordinate is required")
            if any(self.level > r.horizon for r in self.backing.rules):
                raise ResolutionError("level exceeds the digit rule horizon")
        if isinstance(self.backing, FamilyBacked) and self.n != 2:
            raise ConfigError("family-backed sets are planar")

    # constructors ----------------------------------------------------------

    @classmethod
    def from_keys(cls, n: int, level: int, keys) -> "DyadicSet":
        keys = np.unique(np.asarray(keys, dtype=np.int64))
        if keys.size > MAX_CELLS:
            raise CapacityError(f"{keys.size} cells exceed the cap of {MAX_CELLS}")
        return cls(n, level, Explicit(keys))

    @classmethod
    def from_coords(cls, n: int, level: int, coords) -> "DyadicSet":
        arr = np.asarray(coords, dtype=np.int64).reshape(-1, n)
        side = 1 << level
        if arr.size and (arr.min() < 0 or arr.max() >= side):
            raise ConfigError("cell coordinates outside the grid")
        return cls.from_keys(n, level, _encode(arr, n, level))

    @classmethod
    def from_cells(cls, n: int, level: int, cells: Iterable[Sequence[int]]) -> "DyadicSet":
        return cls.from_coords(n, level, [tuple(c) for c in cells])

    @classmethod
    def empty(cls, n: int, level: int) -> "DyadicSet":
        return cls(n, level, Explicit(np.zeros(0, dtype=np.int64)))

    @classmethod
    def full(cls, n: int, level: int) -> "DyadicSet":
        return cls(n, level, DigitBacked(tuple(DigitRule.full(max(level, 1)) for _ in range(n))))

    @classmethod
    def digits(cls, rules: Sequence[DigitRule], level: int) -> "DyadicSet":
        return cls(len(rules), level, DigitBacked(tuple(rules)))

    # views -----------------------------------------------------------------

    @property
    def is_explicit(self) -> bool:
        return isinstance(self.backing, Explicit)

    @property
    def exact(self) -> bool:
        return not isinstance(self.backing, FamilyBacked)

    def keys(self) -> np.ndarray:
        return self.materialize().backing.keys

    def coords(self) -> np.ndarray:
        return _decode(self.keys(), self.n, self.level)

    def cells(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self.coords()]

    def __len__(self) -> int:
        c = self.count()
        if c is None:
            raise TypeError("family-backed sets have no exact length")
        return c

    def count(self) -> int | None:
        """Exact number of cells, or None for family-backed sets."""
        b = self.backing
        if isinstance(b, Explicit):
            return int(b.keys.size)
        if isinstance(b, DigitBacked):
            return 1 << sum(r.free_count(self.level) for r in b.rules)
        return None

    def materialize(self) -> "DyadicSet":
        """Explicit copy of this set (capped at ``MAX_CELLS`` cells)."""
        b = self.backing
        if isinstance(b, Explicit):
            return self
        if isinstance(b, DigitBacked):
            if self.count() > MAX_CELLS:
                raise CapacityError("digit set too large to materialize")
            if self.level > _MAX_LEVEL[self.n]:
                raise ResolutionError("level too fine for explicit storage")
            axes = [_digit_values(r, self.level) for r in b.rules]
            if self.n == 1:
                return DyadicSet(1, self.level, Explicit(axes[0]))
            xs, ys = np.meshgrid(axes[0], axes[1], indexing="ij")
            keys = (xs.ravel() << self.level) | ys.ravel()
            return DyadicSet(2, self.level, Explicit(np.sort(keys)))
        return _materialize_family(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DyadicSet) or (self.n, self.level) != (other.n, other.level):
            return False
        return np.array_equal(self.keys(), other.keys())

    def __repr__(self) -> str:
        kind = type(self.backing).__name__
        return f"DyadicSet(n={self.n}, level={self.level}, backing={kind})"


def _encode(coords: np.ndarray, n: int, level: int) -> np.ndarray:
    if n == 1:
        return coords[:, 0].copy()
    return (coords[:, 0] << level) | coords[:, 1]


def _decode(keys: np.ndarray, n: int, level: int) -> np.ndarray:
    if n == 1:
        return keys.reshape(-1, 1)
    mask = (1 << level) - 1
    return np.column_stack([keys >> level, keys & mask])


def _digit_values(rule: DigitRule, level: int) -> np.ndarray:
    """All level-``level`` cell indices of a digit set, sorted."""
    vals = np.zeros(1, dtype=np.int64)
    for p in range(1, level + 1):
        vals = vals << 1
        if rule.is_free(p):
            vals = np.concatenate([vals, vals | 1])
    return np.sort(vals)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def _check_level(s: DyadicSet, j: int) -> None:
    if j < 1:
        raise ConfigError("levels start at 1")
    if j > s.level:
        raise ResolutionError(f"level {j} exceeds the set resolution {s.level}")


def box_count(s: DyadicSet, j: int) -> float:
    """log2 of the number of level-``j`` cells meeting the set.

    Exact for explicit and digit backings.  Family-backed sets use the
    line-union counter ``log2 #slope cells + j + log2 w`` clipped to
    ``[0, 2j]``, which carries up to about 2 bits of slack.
    """
    _check_level(s, j)
    b = s.backing
    if isinstance(b, Explicit):
        c = coarsen(s, j).backing.keys.size
        return EMPTY if c == 0 else math.log2(c)
    if isinstance(b, DigitBacked):
        return float(sum(r.free_count(j) for r in b.rules))
    return family_log_count(b, j)


def cell_count(s: DyadicSet, j: int) -> int:
    """Exact count at level ``j`` (explicit and digit backings only)."""
    _check_level(s, j)
    if isinstance(s.backing, FamilyBacked):
        raise TypeError("family-backed counts are approximate; use box_count")
    return coarsen(s, j).count()


def family_log_count(b: FamilyBacked, j: int) -> float:
    if b.family is not None:
        fam = b.family
        if len(fam) == 0:
            return EMPTY
        num, den = fam.slopes()
        try:
            slope_cells = np.unique(floor_scaled(num, den, j)).size
        except ResolutionError:
            slope_cells = len({(int(a) << j) // int(d) for a, d in zip(num, den)})
        slope_cells += int(fam.vertical_mask.any())
        w = fam.max_window()
    else:
        sub = coarsen(b.slope_set, min(j, b.slope_set.level))
        lc = box_count(sub, sub.level)
        if lc == EMPTY:
            return EMPTY
        slope_cells = 2.0 ** lc if lc < 1000 else None
        w = b.window[1] - b.window[0]
        if slope_cells is None:
            return float(min(max(lc + j + math.log2(w), 0.0), 2 * j))
    if w <= 0:
        return float(min(max(math.log2(slope_cells), 0.0), 2 * j))
    val = math.log2(slope_cells) + j + math.log2(w)
    return float(min(max(val, 0.0), 2 * j))


def coarsen(s: DyadicSet, j: int) -> DyadicSet:
    """Map every cell to its level-``j`` ancestor."""
    if j == s.level:
        return s
    _check_level(s, j)
    b = s.backing
    if isinstance(b, Explicit):
        shift = s.level - j
        c = _decode(b.keys, s.n, s.level) >> shift
        return DyadicSet(s.n, j, Explicit(np.unique(_encode(c, s.n, j))), s.notes)
    return DyadicSet(s.n, j, b, s.notes)


def union(a: DyadicSet, b: DyadicSet) -> DyadicSet:
    if (a.n, a.level) != (b.n, b.level):
        raise ConfigError("union needs sets of equal dimension and level")
    keys = np.union1d(a.keys(), b.keys())
    if keys.size > MAX_CELLS:
        raise CapacityError("union exceeds the cell cap")
    return DyadicSet(a.n, a.level, Explicit(keys))


def intersection(a: DyadicSet, b: DyadicSet) -> DyadicSet:
    if (a.n, a.level) != (b.n, b.level):
        raise ConfigError("intersection needs sets of equal dimension and level")
    return DyadicSet(a.n, a.level, Explicit(np.intersect1d(a.keys(), b.keys())))


def translate(s: DyadicSet, shift: Sequence[int]) -> DyadicSet:
    """Shift cells by whole level-``s.level`` cells (cells leaving the grid are an error)."""
    c = s.coords() + np.asarray(shift, dtype=np.int64)
    return DyadicSet.from_coords(s.n, s.level, c)


def slice_set(s: DyadicSet, line: LineSpec, j: int) -> DyadicSet:
    """1-dim set of line-parameter cells where the set meets the rasterized line.

    For a non-vertical line this is the x-projection; for a vertical one the
    y-projection.
    """
    if s.n != 2:
        raise ConfigError("slicing needs a planar set")
    base = coarsen(s, j) if j < s.level else s
    if j > s.level:
        raise ResolutionError("slice level exceeds the set resolution")
    hit = np.intersect1d(base.keys(), rasterize_line(line, j).backing.keys)
    c = _decode(hit, 2, j)
    proj = c[:, 1] if line.vertical else c[:, 0]
    return DyadicSet(1, j, Explicit(np.unique(proj)))


# ---------------------------------------------------------------------------
# rasterization
# ---------------------------------------------------------------------------


def rasterize_line(line: LineSpec, j: int, closed: bool = False) -> DyadicSet:
    """Level-``j`` cells met by the segment, in exact integer arithmetic.

    The default uses cell membership of points (half-open cells), so a line
    through a grid corner only picks up the cell owning that corner.  With
    ``closed=True`` every closed square touching the segment is included.
    """
    if j < 0 or j > _MAX_LEVEL[2]:
        raise ResolutionError(f"rasterization level must be in [0, {_MAX_LEVEL[2]}]")
    if line.vertical:
        cols, rows = _raster_vertical(line, j, closed)
    else:
        cols, rows = _raster_graph(line, j, closed)
    if cols.size == 0:
        return DyadicSet.empty(2, j)
    keys = (cols.astype(np.int64) << j) | rows.astype(np.int64)
    return DyadicSet(2, j, Explicit(np.unique(keys)))


def _index_range(lo: Fraction, hi: Fraction, side: int, closed: bool) -> tuple[int, int]:
    """Cell indices along one axis met by the closed interval ``[lo, hi]``."""
    if closed:
        first = _ceil_div(lo.numerator * side, lo.denominator) - 1
    else:
        first = _floor_div(lo.numerator * side, lo.denominator)
    last = _floor_div(hi.numerator * side, hi.denominator)
    return max(first, 0), min(last, side - 1)


def _raster_vertical(line: LineSpec, j: int, closed: bool):
    side = 1 << j
    c = line.b
    c0, c1 = _index_range(c, c, side, closed)
    r0, r1 = _index_range(line.x0, line.x1, side, closed)
    if c0 > c1 or r0 > r1:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    cc, rr = np.meshgrid(np.arange(c0, c1 + 1), np.arange(r0, r1 + 1), indexing="ij")
    return cc.ravel(), rr.ravel()


def _raster_graph(line: LineSpec, j: int, closed: bool):
    side = 1 << j
    a, b, w0, w1 = line.a, line.b, line.x0, line.x1
    i0, i1 = _index_range(w0, w1, side, closed)
    if i0 > i1:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    # x measured in units of 1/U, U = side * M
    M = math.lcm(w0.denominator, w1.denominator)
    U = side * M
    w0u, w1u = w0.numerator * (U // w0.denominator), w1.numerator * (U // w1.denominator)
    an, ad, bn, bd = a.numerator, a.denominator, b.numerator, b.denominator
    # y * side = (an*bd*xu + bn*ad*U) / (ad*bd*M)
    slope_k, offset, den = an * bd, bn * ad * U, ad * bd * M
    bound = abs(slope_k) * (U + M) + abs(offset) + den * 4
    dtype = np.int64 if bound < _I64_SAFE and U * 2 < _I64_SAFE else object
    cols = np.arange(i0, i1 + 1, dtype=np.int64)
    X0 = cols.astype(dtype) * M
    X1 = X0 + M
    lo = np.maximum(X0, w0u)
    if closed:
        hi = np.minimum(X1, w1u)
        valid = lo <= hi
        right_open = np.zeros(cols.size, dtype=bool)
    else:
        right_open = X1 <= w1u
        hi = np.where(right_open, X1, w1u)
        valid = (lo < hi) | ((lo == hi) & ~right_open)
    n_lo = slope_k * lo + offset
    n_hi = slope_k * hi + offset
    if closed:
        y_min = np.minimum(n_lo, n_hi)
        y_max = np.maximum(n_lo, n_hi)
        k0 = _ceil_div(y_min, den) - 1
        k1 = _floor_div(y_max, den)
    elif an > 0:
        k0 = _floor_div(n_lo, den)
        k1 = np.where(right_open, _ceil_div(n_hi, den) - 1, _floor_div(n_hi, den))
    elif an < 0:
        k0 = _floor_div(n_hi, den)
        k1 = _floor_div(n_lo, den)
    else:
        k0 = _floor_div(n_lo, den)
        k1 = k0
    k0 = np.maximum(np.asarray(k0), 0).astype(np.int64)
    k1 = np.minimum(np.asarray(k1), side - 1).astype(np.int64)
    keep = np.asarray(valid, dtype=bool) & (k0 <= k1)
    cols, k0, k1 = cols[keep], k0[keep], k1[keep]
    counts = k1 - k0 + 1
    rep_cols = np.repeat(cols, counts)
    starts = np.repeat(k0, counts)
    offsets = np.arange(rep_cols.size) - np.repeat(np.cumsum(counts) - counts, counts)
    return rep_cols, starts + offsets


def rasterize_family(family: LineFamily, j: int) -> DyadicSet:
    """Explicit union of the rasterizations of every line."""
    parts = [rasterize_line(ln, j).backing.keys for ln in family]
    if not parts:
        return DyadicSet.empty(2, j)
    keys = np.unique(np.concatenate(parts))
    if keys.size > MAX_CELLS:
        raise CapacityError("family rasterization exceeds the cell cap")
    return DyadicSet(2, j, Explicit(keys))


def family_lines(b: FamilyBacked) -> LineFamily:
    """The explicit line family of a family backing (pencils are expanded)."""
    if b.family is not None:
        return b.family
    slopes = b.slope_set.materialize()
    vals = slopes.keys()
    return LineFamily.from_arrays(vals, np.full(vals.size, 1 << slopes.level),
                                  np.full(vals.size, b.intercept.numerator),
                                  np.full(vals.size, b.intercept.denominator),
                                  x0=b.window[0], x1=b.window[1])


def _materialize_family(s: DyadicSet) -> DyadicSet:
    return rasterize_family(family_lines(s.backing), s.level)
