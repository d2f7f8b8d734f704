from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lineal_lab import constructions as cons
from lineal_lab.digits import DigitRule
from lineal_lab.dimension import default_window, dim_report, inequality_verdict
from lineal_lab.dyadic import DyadicSet, box_count, translate
from lineal_lab.errors import ConfigError


def test_full_square_report():
    rep = dim_report(DyadicSet.full(2, 16), window=(4, 16))
    assert rep.lower_box == rep.upper_box == 2.0
    assert rep.regression_slope == pytest.approx(2.0)
    assert rep.exact


def test_cantor_half_generation_slope():
    s, _ = cons.cantor(Fraction(1, 2), 10)  # level 20
    rep = dim_report(s, levels=range(8, 21, 2))
    assert rep.regression_slope == pytest.approx(0.5, abs=0.02)


def test_digit_x_extrema_window():
    rep = dim_report(cons.digit_set(DigitRule.geometric(2, 64), 64), window=(4, 64))
    assert rep.lower_box == pytest.approx(2 / 7)
    assert rep.upper_box == pytest.approx(2 / 3)


def test_digit_density_matches_rule():
    rule = DigitRule.squares(256)
    rep = dim_report(cons.digit_set(rule, 256), window=(26, 256))
    lo, hi = rule.densities(26, 256)
    assert (rep.lower_box, rep.upper_box) == pytest.approx((lo, hi))


def test_default_window():
    assert default_window(64) == (7, 64)
    assert default_window(256) == (26, 256)


def test_report_needs_four_levels():
    with pytest.raises(ConfigError):
        dim_report(DyadicSet.full(1, 8), window=(6, 8))


def test_empty_report_is_flagged():
    rep = dim_report(DyadicSet.empty(2, 8), window=(2, 8))
    assert rep.empty


def test_csv_layout():
    rep = dim_report(DyadicSet.full(1, 6), window=(2, 6))
    lines = rep.to_csv().splitlines()
    assert lines[0] == "j,log2N,ratio"
    assert len(lines) == 6 and lines[1].startswith("2,")


def test_family_report_is_approximate():
    rep = dim_report(cons.slope_pencil(DigitRule.squares(256), 256), window=(26, 256))
    assert not rep.exact and "approximate" in rep.backing_note


# --- verdicts -------------------------------------------------------------------


def test_verdict_pass_at_zero_margin():
    v = inequality_verdict(1.0, 2 * 1.0 - 1, slack=0.05, label="pdim L(E) <= 2 pdim E - 1")
    assert v.status == "PASS" and v.margin == 0


def test_verdict_fail_and_slack():
    assert inequality_verdict(1.2, 1.0, slack=0.05).status == "FAIL"
    assert inequality_verdict(1.04, 1.0, slack=0.05).status == "PASS"


def test_verdict_vacuous_on_empty_operand():
    empty = dim_report(DyadicSet.empty(1, 8), window=(2, 8))
    assert inequality_verdict(empty, 1.0).status == "VACUOUS"
    assert inequality_verdict(None, 1.0).status == "VACUOUS"


def test_failed_verdict_dumps_operands():
    rep = dim_report(DyadicSet.full(1, 8), window=(2, 8))
    ok = inequality_verdict(rep.upper_box, 1.0, label="x", operands={"E": rep})
    assert ok.to_text().startswith("PASS") and "\n" not in ok.to_text()
    bad = inequality_verdict(rep.upper_box, 0.5, label="x", operands={"E": rep})
    assert bad.to_text().splitlines()[1].startswith("  E = DimReport(lower=1.000000")
    with pytest.raises(ConfigError):
        inequality_verdict(rep, 1.0)


# --- properties -----------------------------------------------------------------

cells = st.lists(st.tuples(st.integers(0, 31), st.integers(0, 31)), min_size=1, max_size=40)


@settings(max_examples=60, deadline=None)
@given(cells=cells, dx=st.integers(0, 31), dy=st.integers(0, 31))
def test_translation_invariance(cells, dx, dy):
    s = DyadicSet.from_cells(2, 6, cells)
    t = translate(s, (dx, dy))
    for j in range(1, 7):
        assert box_count(t, j) >= box_count(s, j) - 2 - 1e-12  # ancestor shifts can split cells
    # whole-cell shifts at the coarsest level keep every count
    shift = DyadicSet.from_cells(2, 6, cells)
    big = translate(shift, (32, 0))
    assert [box_count(big, j) for j in range(1, 7)] == [box_count(shift, j) for j in range(1, 7)]


@settings(max_examples=60, deadline=None)
@given(cells=cells)
def test_report_increments_within_dimension(cells):
    rep = dim_report(DyadicSet.from_cells(2, 6, cells), window=(1, 6))
    counts = [c for _, c in rep.levels]
    assert all(0 <= b - a <= 2 + 1e-12 for a, b in zip(counts, counts[1:]))
    assert 0 <= rep.lower_box <= rep.upper_box <= 2
