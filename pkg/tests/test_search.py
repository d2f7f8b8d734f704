from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lineal_lab.errors import ConfigError
from lineal_lab.kprofile import KProfile
from lineal_lab.search import (
    INEQUALITIES,
    SearchConfig,
    adversarial_search,
    evaluate,
    profile_margin,
    project,
    random_params,
)

E1 = F(1, 100)


def test_config_validation():
    with pytest.raises(ConfigError):
        SearchConfig("nope")
    with pytest.raises(ConfigError):
        SearchConfig("teal-after-clamp", R=2)


@pytest.mark.parametrize("ineq", INEQUALITIES)
def test_random_params_are_projection_fixed_points(ineq):
    rng = np.random.default_rng(3)
    for _ in range(30):
        p = random_params(rng, ineq, 4, 256)
        assert project(p, ineq, 4, 256) == p


@settings(max_examples=80, deadline=None)
@given(raw=st.lists(st.integers(-2000, 4000), min_size=1 + 3 + 4, max_size=1 + 3 + 4))
def test_projection_yields_valid_profiles(raw):
    p = project(raw, "teal-after-clamp", 3, 64)
    assert project(p, "teal-after-clamp", 3, 64) == p
    evaluate(p, "teal-after-clamp", E1, 3, 64)  # KProfile validation would raise


def test_teal_margin_matches_direct_check():
    f = KProfile.from_slopes(2, [9, 10], [0, 2])
    m, _ = profile_margin(f, 10, E1, "teal-no-clamp")
    assert m == F(-11, 10)
    m2, tr = profile_margin(f, 10, E1, "teal-after-clamp")
    assert m2 >= 0 and tr.intermediates["clamp_applied"]


def test_search_is_deterministic():
    cfg = SearchConfig("teal-no-clamp", n_seeds=60, R=128, descent_starts=1, descent_rounds=1, seed=5)
    a, b = adversarial_search(cfg), adversarial_search(cfg)
    assert (a.worst_margin, a.worst_seed, a.worst_params) == (b.worst_margin, b.worst_seed, b.worst_params)


def test_control_finds_violation_quickly():
    res = adversarial_search(SearchConfig("teal-no-clamp", n_seeds=100, R=256, descent_starts=1))
    assert res.violated and res.violations > 0


@pytest.mark.parametrize("ineq", INEQUALITIES)
def test_small_search_finds_nothing(ineq):
    res = adversarial_search(SearchConfig(ineq, n_seeds=150, R=256, descent_starts=1, descent_rounds=1))
    assert res.worst_margin >= -F(1, 10 ** 9)
    assert res.evaluations >= 150
