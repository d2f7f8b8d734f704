from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lineal_lab.digits import DigitRule
from lineal_lab.dyadic import (
    EMPTY,
    MAX_CELLS,
    DyadicCell,
    DyadicSet,
    FamilyBacked,
    LineFamily,
    LineSpec,
    box_count,
    cell_count,
    coarsen,
    floor_scaled,
    intersection,
    rasterize_family,
    rasterize_line,
    slice_set,
    translate,
    union,
)
from lineal_lab.errors import CapacityError, ConfigError, ResolutionError

from oracles import closed_cells, halfopen_cells

X_RULE = DigitRule.geometric(2, 64)  # zero on [1,2), [4,8), [16,32), ...


# --- counting ---------------------------------------------------------------


def test_full_square_count():
    assert box_count(DyadicSet.full(2, 3), 3) == 6


def test_digit_x_count_at_16():
    s = DyadicSet.digits([X_RULE], 64)
    assert box_count(s, 16) == 10
    assert box_count(coarsen(DyadicSet.digits([X_RULE], 32), 16), 16) == 10


def test_empty_sentinel():
    assert box_count(DyadicSet.empty(2, 5), 3) == EMPTY


def test_box_count_level_checks():
    s = DyadicSet.full(1, 4)
    with pytest.raises(ResolutionError):
        box_count(s, 5)
    with pytest.raises(ConfigError):
        box_count(s, 0)


def test_cell_count_rejects_family():
    fam = LineFamily([LineSpec(Fraction(1, 2), 0)])
    with pytest.raises(TypeError):
        cell_count(DyadicSet(2, 4, FamilyBacked(family=fam)), 4)


def test_capacity_cap():
    with pytest.raises(CapacityError):
        DyadicSet.full(2, 13).materialize()
    assert DyadicSet.full(2, 12).materialize().count() == MAX_CELLS


# --- coarsen / union / slice -------------------------------------------------


def test_coarsen_halves_coordinates():
    s = DyadicSet.from_cells(2, 3, [(5, 3)])
    assert coarsen(s, 2).cells() == [(2, 1)]
    assert coarsen(s, 3) is s


def test_union_idempotent():
    a = DyadicSet.from_cells(2, 1, [(0, 0)])
    b = DyadicSet.from_cells(2, 1, [(0, 0), (1, 1)])
    assert union(a, b) == b


def test_union_of_two_rasterized_lines():
    flat = rasterize_line(LineSpec(0, 0), 1)
    diag = rasterize_line(LineSpec(1, 0), 1)
    assert union(flat, diag).cells() == [(0, 0), (1, 0), (1, 1)]


def test_intersection_and_translate():
    a = DyadicSet.from_cells(2, 2, [(0, 0), (1, 1), (2, 2)])
    b = DyadicSet.from_cells(2, 2, [(1, 1), (3, 3)])
    assert intersection(a, b).cells() == [(1, 1)]
    assert translate(a, (1, 0)).cells() == [(1, 0), (2, 1), (3, 2)]


def test_slice_full_square_is_full():
    for j in (1, 3, 5):
        sl = slice_set(DyadicSet.full(2, j), LineSpec(Fraction(1, 3), Fraction(1, 5)), j)
        assert sl.count() == 1 << j


def test_slice_along_own_line_is_window_projection():
    ln = LineSpec(Fraction(1, 2), Fraction(1, 8))
    for j in (2, 4, 6):
        assert slice_set(rasterize_line(ln, j), ln, j).count() == 1 << j


def test_slice_vertical_fiber_of_two_point_set():
    from lineal_lab.constructions import cantor, two_point_example
    fibers, _ = two_point_example(Fraction(1, 2), Fraction(3, 2), 3)
    sl = slice_set(fibers, LineSpec(0, 0, 0, 1, vertical=True), fibers.level)
    # the left fiber is a quarter-scale Cantor set: cells of C at level J sit in [0, 2^J)
    c, _ = cantor(Fraction(1, 2), 3)
    assert set(sl.keys().tolist()) == set(c.keys().tolist())


# --- rasterization -----------------------------------------------------------


@pytest.mark.parametrize("a,j,expected", [
    (0, 3, [(i, 0) for i in range(8)]),
    (1, 1, [(0, 0), (1, 1)]),
    (Fraction(1, 2), 2, [(0, 0), (1, 0), (2, 1), (3, 1)]),
])
def test_rasterize_examples(a, j, expected):
    assert rasterize_line(LineSpec(a, 0), j).cells() == expected


def test_closed_mode_picks_up_corner_cells():
    assert rasterize_line(LineSpec(1, 0), 1, closed=True).cells() == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_rasterize_family_matches_union_of_lines():
    lines = [LineSpec(Fraction(k, 4), Fraction(1, 8)) for k in range(-3, 4)]
    fam = LineFamily(lines)
    expect = set()
    for ln in lines:
        expect |= set(rasterize_line(ln, 5).cells())
    assert set(rasterize_family(fam, 5).cells()) == expect


dyadic = st.builds(lambda n, m: Fraction(n, 1 << m), st.integers(-64, 64), st.integers(0, 5))
window = st.tuples(st.integers(0, 16), st.integers(0, 16)).map(
    lambda t: (Fraction(min(t), 16), Fraction(max(t), 16)))


@settings(max_examples=150, deadline=None)
@given(a=dyadic.filter(lambda v: -2 <= v <= 2), b=dyadic.filter(lambda v: -1 <= v <= 1),
       w=window, j=st.integers(1, 5), vert=st.booleans())
def test_rasterize_matches_halfopen_oracle(a, b, w, j, vert):
    if vert:
        b = abs(b)
    ln = LineSpec(0 if vert else a, b, w[0], w[1], vertical=vert)
    got = set(rasterize_line(ln, j).cells())
    assert got == halfopen_cells(ln.a, ln.b, w[0], w[1], j, vertical=vert)


@settings(max_examples=150, deadline=None)
@given(a=dyadic.filter(lambda v: -2 <= v <= 2), b=dyadic.filter(lambda v: -1 <= v <= 1),
       w=window, j=st.integers(1, 5), vert=st.booleans())
def test_rasterize_matches_closed_oracle(a, b, w, j, vert):
    if vert:
        b = abs(b)
    ln = LineSpec(0 if vert else a, b, w[0], w[1], vertical=vert)
    got = set(rasterize_line(ln, j, closed=True).cells())
    assert got == closed_cells(ln.a, ln.b, w[0], w[1], j, vertical=vert)


@settings(max_examples=60, deadline=None)
@given(a=st.fractions(-2, 2, max_denominator=50), b=st.fractions(-1, 1, max_denominator=50),
       j=st.integers(1, 5))
def test_rasterize_general_rationals(a, b, j):
    got = set(rasterize_line(LineSpec(a, b), j).cells())
    assert got == halfopen_cells(a, b, 0, 1, j)


def test_rasterize_rejects_deep_levels():
    with pytest.raises(ResolutionError):
        rasterize_line(LineSpec(0, 0), 40)


# --- properties ---------------------------------------------------------------

cells2 = st.lists(st.tuples(st.integers(0, 63), st.integers(0, 63)), min_size=1, max_size=60)


@settings(max_examples=80, deadline=None)
@given(cells=cells2)
def test_counts_monotone_with_bounded_increments(cells):
    s = DyadicSet.from_cells(2, 6, cells)
    counts = [box_count(s, j) for j in range(1, 7)]
    for lo, hi in zip(counts, counts[1:]):
        assert 0 <= hi - lo <= 2 + 1e-12


@settings(max_examples=80, deadline=None)
@given(cells=cells2, j=st.integers(1, 6))
def test_coarsen_count_coherence(cells, j):
    s = DyadicSet.from_cells(2, 6, cells)
    assert box_count(s, j) == box_count(coarsen(s, j), j)


@settings(max_examples=40, deadline=None)
@given(ratio=st.integers(2, 4), parity=st.sampled_from(["odd", "even"]), j=st.integers(1, 40))
def test_digit_counts_monotone_and_coherent(ratio, parity, j):
    s = DyadicSet.digits([DigitRule.geometric(ratio, 48, parity)], 48)
    assert box_count(s, j) == box_count(coarsen(s, j), j)
    if j > 1:
        assert 0 <= box_count(s, j) - box_count(s, j - 1) <= 1


def test_digit_backed_materialize_matches_enumeration():
    rule = DigitRule.geometric(2, 12)
    s = DyadicSet.digits([rule], 12)
    free = rule.free_positions(12)
    expect = set()
    for mask in range(1 << len(free)):
        v = 0
        for bit, p in enumerate(free):
            if mask >> bit & 1:
                v |= 1 << (12 - p)
        expect.add(v)
    assert set(s.keys().tolist()) == expect


def test_floor_scaled_overflow_guard():
    num = np.array([1, -1], dtype=np.int64)
    den = np.array([3, 3], dtype=np.int64)
    assert floor_scaled(num, den, 4).tolist() == [5, -6]
    with pytest.raises(ResolutionError):
        floor_scaled(np.array([1 << 40]), np.array([1]), 40)


def test_dyadic_cell_relations():
    c = DyadicCell(3, (5, 3))
    assert c.ancestor(1) == DyadicCell(1, (1, 0))
    assert DyadicCell(1, (1, 0)).contains((Fraction(5, 8), Fraction(3, 8)))
    assert not DyadicCell(1, (1, 0)).contains((Fraction(1, 2), Fraction(1, 2)))


def test_line_family_dedupes_and_roundtrips():
    lines = [LineSpec(Fraction(1, 2), 0), LineSpec(Fraction(2, 4), 0), LineSpec(0, Fraction(1, 3))]
    fam = LineFamily(lines)
    assert len(fam) == 2
    assert set(fam) == {LineSpec(Fraction(1, 2), 0), LineSpec(0, Fraction(1, 3))}


def test_line_spec_through_points():
    ln = LineSpec.through((Fraction(0), Fraction(1, 4)), (Fraction(1, 2), Fraction(3, 4)))
    assert (ln.a, ln.b) == (1, Fraction(1, 4))
    v = LineSpec.through((Fraction(1, 2), Fraction(0)), (Fraction(1, 2), Fraction(1)))
    assert v.vertical and v.b == Fraction(1, 2)
