import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from corsol.coefficient import catalog, parse_coefficient
from corsol.diagnostics import (COMPACT, INCONCLUSIVE, NOT_COMPACT, NOT_SOLVABLE, NOT_TENDING,
                                SOLVABLE, TENDS, compactness_verdict, d_tends_to_zero,
                                equivalence_crosscheck, mass_tends_to_infinity,
                                solvability_verdict, strip_verdict)

ODD_PI = [(2 * k + 1) * math.pi for k in range(1, 6)]


def test_zero_coefficient_not_solvable():
    v = solvability_verdict(parse_coefficient("0*x"), [1, 2, 4], 16, 0.25)
    assert v.verdict == NOT_SOLVABLE


def test_integrable_coefficient_not_solvable():
    v = solvability_verdict(parse_coefficient("exp(-abs(x))"), [1, 2, 4, 8], 40, 0.25)
    assert v.verdict == NOT_SOLVABLE
    assert all(e.inf_value < 1e-6 for e in v.evidence)


def test_small_window_is_inconclusive():
    v = solvability_verdict(parse_coefficient("exp(-abs(x))"), [1, 2, 4, 8], 30, 0.25)
    assert v.verdict == INCONCLUSIVE


def test_gaussian_solvable():
    v = solvability_verdict(catalog("gaussian_osc"), [1, 2, 4], 2, 0.01)
    assert v.verdict == SOLVABLE and v.witness_a == 1
    assert v.q0_at_witness > 2.0


@pytest.mark.parametrize("name, window", [("constant_one", 8), ("exp_osc", 3), ("one_plus_cos", 8)])
def test_catalog_solvable(name, window):
    assert solvability_verdict(catalog(name), [0.5, 1, 2], window, 0.05).verdict == SOLVABLE


def test_ladder_validation():
    with pytest.raises(ValueError):
        solvability_verdict(catalog("constant_one"), [2, 1], 4, 0.1)


@pytest.mark.parametrize("name", ["constant_one", "exp_osc", "one_plus_cos"])
def test_strip_p_one(name):
    assert strip_verdict(catalog(name), 1, [3, 4, 5]).verdict == NOT_TENDING


def test_strip_examples():
    v = strip_verdict(catalog("one_plus_cos"), 2, ODD_PI)
    assert v.verdict == NOT_TENDING
    assert all(d > math.pi / 2 for _, d in v.d_trend)
    e = strip_verdict(catalog("exp_osc"), 2, [3, 4, 5, 6, 7], threshold=0.1)
    assert e.verdict == TENDS
    for x, d in e.d_trend:
        assert 0.9 < d * math.exp(x) < 1.1


def test_compactness_examples():
    assert compactness_verdict(catalog("exp_osc"), 2, [3, 4, 5, 6, 7]).verdict == COMPACT
    assert compactness_verdict(catalog("exp_osc"), 1, [3, 4, 5, 6, 7]).verdict == COMPACT
    assert compactness_verdict(catalog("one_plus_cos"), "inf", ODD_PI).verdict == NOT_COMPACT
    assert compactness_verdict(catalog("constant_one"), 1.5, [1, 2, 4, 8]).verdict == NOT_COMPACT


@pytest.mark.parametrize("name, probes", [
    ("exp_osc", [3, 4, 5, 6, 7]),
    ("one_plus_cos", ODD_PI),
    ("constant_one", [1, 2, 4, 8]),
])
def test_equivalence(name, probes):
    assert equivalence_crosscheck(catalog(name), probes).agreement


def test_unsorted_probes_rejected():
    with pytest.raises(ValueError):
        strip_verdict(catalog("constant_one"), 2, [4, 1, 2])


@given(st.lists(st.floats(0.01, 10), min_size=2, max_size=6, unique=True))
def test_trend_helpers_are_complementary(vals):
    inc = sorted(vals)
    assert not d_tends_to_zero(inc)
    assert not mass_tends_to_infinity(inc[::-1])


@pytest.mark.parametrize("p", [1.5, 2, "inf"])
def test_lower_bound_coupling(p):
    from corsol.green import green_norm, lower_bound

    c = catalog("one_plus_cos")
    v = strip_verdict(c, p, ODD_PI)
    assert v.verdict == NOT_TENDING
    delta = min(d for _, d in v.d_trend)
    for x, _ in v.d_trend:
        assert green_norm(c, x, p) >= lower_bound(delta, p)
