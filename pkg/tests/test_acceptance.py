"""The nine acceptance criteria, each at its stated tolerance and time budget."""

import time
from fractions import Fraction as F
from pathlib import Path

import numpy as np
import pytest

from lineal_lab import constructions as cons
from lineal_lab.atlas import verify_ren_wang_cor
from lineal_lab.dyadic import LineSpec, rasterize_line
from lineal_lab.kprofile import KProfile, bound_gap, clamp_oracle, join, select_eta, subtract
from lineal_lab.search import INEQUALITIES, SearchConfig, adversarial_search
from lineal_lab.suite import suite_cantor, suite_coding, suite_example_5_1, suite_two_point, worked_profile

from oracles import closed_cells, closed_cells_fast, piecewise_eval_many

GOLDEN = Path(__file__).parent / "golden" / "worked_profile.txt"


def _all_pass(rows):
    return all(r.status != "FAIL" for r in rows)


def _rows_text(rows):
    return "; ".join(f"{r.check}={r.as_list()[2]}" for r in rows)


@pytest.mark.parametrize("alpha", ["1/2", "3/5", "3/4"])
def test_1_cantor_dimension(alpha, verdict):
    t0 = time.perf_counter()
    rows = suite_cantor(alphas=(alpha,))
    dt = time.perf_counter() - t0
    verdict(1, _all_pass(rows) and dt < 5, f"{_rows_text(rows)} ({dt:.2f} s)")


def test_2_example_graph(verdict):
    t0 = time.perf_counter()
    rows = suite_example_5_1()
    dt = time.perf_counter() - t0
    verdict(2, _all_pass(rows) and dt < 30, f"{_rows_text(rows)} ({dt:.2f} s)")


@pytest.mark.slow
def test_3_two_point_sharpness(verdict):
    t0 = time.perf_counter()
    rows = suite_two_point(alpha="1/2", k=10, samples=20, seed=0)
    dt = time.perf_counter() - t0
    verdict(3, _all_pass(rows) and dt < 60, f"{_rows_text(rows)} ({dt:.1f} s)")


@pytest.mark.slow
def test_4_profile_pipeline_soundness(verdict):
    t0 = time.perf_counter()
    worst = {}
    for ineq in INEQUALITIES:
        worst[ineq] = adversarial_search(SearchConfig(ineq, n_breakpoints=6, n_seeds=10_000, R=1024)).worst_margin
    control = adversarial_search(SearchConfig("teal-no-clamp", n_breakpoints=6, n_seeds=10_000, R=1024))
    dt = time.perf_counter() - t0
    ok = all(m >= -1e-9 for m in worst.values()) and control.violated and dt < 60
    detail = ", ".join(f"{k}={float(v):.3g}" for k, v in worst.items())
    verdict(4, ok, f"{detail}; control={float(control.worst_margin):.3g} ({dt:.1f} s)")


def test_5_clamp_and_join_exactness(verdict):
    rng = np.random.default_rng(2024)
    R, n_prof, bad = 1024, 10_000, 0
    t0 = time.perf_counter()
    for _ in range(n_prof):
        k = int(rng.integers(0, 7))
        pos = sorted({int(v) for v in rng.integers(1, R, size=k)}) + [R]
        f = KProfile.from_slopes(2, pos, [F(int(rng.integers(0, 9)), 4) for _ in pos])
        r = int(rng.integers(1, R + 1))
        eta = F(int(rng.integers(0, 129)), 64)
        g, _ = clamp_oracle(f, r, eta)
        # invariants: starts at 0, slopes in [0, n], horizon r
        bad += g.breakpoints[0] != (0, 0) or g.R != r or not all(0 <= s <= g.n for s in g.slopes())
        tn = rng.integers(0, 16 * r + 1, size=100)
        gn, gd = piecewise_eval_many(g.breakpoints, tn, 16)
        fn, fd = piecewise_eval_many(f.breakpoints, tn, 16)
        cap = eta * r
        below = fn * cap.denominator <= cap.numerator * fd
        en, ed = np.where(below, fn, cap.numerator), np.where(below, fd, cap.denominator)
        bad += not (gn * ed == en * gd).all()
        # round trip: (y, x | y) -> joint -> x | y
        fy = KProfile.from_slopes(1, pos, [F(int(rng.integers(0, 5)), 4) for _ in pos])
        fx = KProfile.from_slopes(1, pos[-2:], [F(int(rng.integers(0, 5)), 4) for _ in pos[-2:]])
        joint = join(fy, fx)
        back = subtract(joint, fy)
        bad += any(back(x) != fx(x) for x in set(fy.positions) | set(fx.positions))
    dt = time.perf_counter() - t0
    verdict(5, bad == 0 and dt < 10, f"{n_prof} profiles x 100 points, {bad} mismatches ({dt:.2f} s)")


def test_6_worked_example(verdict):
    f = worked_profile()
    tr = bound_gap(f, 10, F(1, 100))
    text = tr.to_text() + f"eta@4/100: {select_eta(f, 10, F(4, 100)).eta}\n"
    ok = (tr.intermediates["c_r"] == 6 and f(6) == 4 and tr.lower == 11 and tr.upper == F(183, 10)
          and tr.upper - tr.lower == F(73, 10) <= 10 and select_eta(f, 10, F(4, 100)).eta == F(26, 64)
          and text == GOLDEN.read_text())
    verdict(6, ok, f"lower={tr.lower} upper={tr.upper} gap={tr.upper - tr.lower} golden-match={text == GOLDEN.read_text()}")


def test_7_corollary_sweep(verdict):
    t0 = time.perf_counter()
    rep = verify_ren_wang_cor("1/100")
    dt = time.perf_counter() - t0
    ok = rep.violations == 0 and rep.equality_on_t_lt_s and rep.points >= 20_000 and dt < 5
    verdict(7, ok, f"{rep.points} points, {rep.violations} violations, "
                   f"t<s equalities {rep.first_branch_equalities}/{rep.counts['t<s']} ({dt:.2f} s)")


def test_8_coding(verdict):
    t0 = time.perf_counter()
    rows = suite_coding(seed=0, n_encode=100, n_split=100, n_pairs=1000)
    dt = time.perf_counter() - t0
    verdict(8, _all_pass(rows) and dt < 10, f"{_rows_text(rows)} ({dt:.2f} s)")


def _random_dyadic(rng, lo, hi, max_exp):
    den = 1 << int(rng.integers(0, max_exp + 1))
    return F(int(rng.integers(lo * den, hi * den + 1)), den)


def test_9_rasterization_oracle(verdict):
    rng = np.random.default_rng(9)
    bad = 0
    n_lines = 1000
    for i in range(n_lines):
        j = int(rng.integers(1, 11))
        u, v = sorted((_random_dyadic(rng, 0, 1, 10), _random_dyadic(rng, 0, 1, 10)))
        if i % 10 == 0:
            b = _random_dyadic(rng, 0, 1, 10)
            got = rasterize_line(LineSpec(0, b, u, v, vertical=True), j, closed=True)
            want = closed_cells(0, b, u, v, j, vertical=True)
        else:
            a, b = _random_dyadic(rng, -4, 4, 10), _random_dyadic(rng, -2, 2, 10)
            got = rasterize_line(LineSpec(a, b, u, v), j, closed=True)
            want = closed_cells_fast(a, b, u, v, j)
        bad += set(got.cells()) != want
    verdict(9, bad == 0, f"{n_lines} random dyadic lines at j<=10, {bad} mismatches")
