import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corsol.coefficient import (catalog, d_function, d_sup_estimate, d_sweep, decay_floor, mass,
                                parse_coefficient, q0_estimate, r_covering, reflected, resolve,
                                shifted)
from corsol.errors import ExpressionSyntaxError, MassDeficit, NotSolvable, UnknownName
from oracle_values import ORACLE


def test_parse_constant():
    c = parse_coefficient("1")
    np.testing.assert_array_equal(c(np.linspace(-3, 3, 5)), np.ones(5))


def test_parse_gaussian_expression():
    c = parse_coefficient("exp(x^2) + exp(x^2)*cos(exp(x^2))")
    assert c(0.0) == pytest.approx(1 + math.cos(1.0), rel=1e-15)


def test_parse_error():
    with pytest.raises(ExpressionSyntaxError) as e:
        parse_coefficient("1 + cos(x")
    assert e.value.position == 9


def test_catalog_entries(coefs):
    one = coefs["constant_one"]
    assert one.q1(3.0) == 1.0 and one.q2(3.0) == 0.0
    assert one.s(8.0) == pytest.approx(3.0)
    assert coefs["gaussian_osc"](0.0) == pytest.approx(1 + math.cos(1.0), rel=1e-15)
    assert coefs["one_plus_cos"](math.pi) == pytest.approx(0.0, abs=1e-15)


def test_unknown_catalog_name():
    with pytest.raises(UnknownName) as e:
        catalog("no_such_thing")
    assert "constant_one" in str(e.value)


def test_resolve_falls_back_to_expression():
    assert resolve("expr:2 + 0*x")(1.0) == 2.0
    with pytest.raises(UnknownName):
        resolve("2 + 0*x")
    assert resolve("exp_osc").label == "exp_osc"


@pytest.mark.parametrize("name", ["gaussian_osc", "exp_osc"])
def test_split_sums_to_q(coefs, name):
    c = coefs[name]
    xs = np.linspace(-2.5, 2.5, 101)
    np.testing.assert_allclose(c.q1(xs) + c.q2(xs), c(xs), rtol=1e-14, atol=1e-12)  # cancellation near q = 0


def test_d_constant_one(coefs):
    for x in (-3.0, 0.0, 7.5):
        assert abs(d_function(coefs["constant_one"], x).d - 1.0) <= 1e-10


def test_d_one_plus_cos_oracle(coefs):
    r = d_function(coefs["one_plus_cos"], 0.0, root_tol=1e-12)
    assert abs(r.d - ORACLE["d_one_plus_cos_0"]) <= 1e-10
    assert r.bracket[0] <= r.d <= r.bracket[0] + 1e-11


@pytest.mark.parametrize("x", [0.0, 3.0, 4.0, 5.0, 6.0, 7.0])
def test_d_exp_osc_oracle(coefs, x):
    d = d_function(coefs["exp_osc"], x).d
    assert d == pytest.approx(ORACLE[f"d_exp_osc_{x:g}"], rel=1e-9)
    if x == 6.0:
        assert 0.95 <= math.exp(6.0) * d <= 1.05


@pytest.mark.parametrize("x", [0.0, 1.5, 2.0, 2.5])
def test_d_gaussian_osc_oracle(coefs, x):
    d = d_function(coefs["gaussian_osc"], x).d
    assert d == pytest.approx(ORACLE[f"d_gauss_osc_{x:g}"], rel=1e-9)


def test_d_sweep_matches_pointwise(coefs):
    c = coefs["one_plus_cos"]
    xs = [-4.0, -1.0, 0.5, 2.0, 9.0]
    swept = [r.d for r in d_sweep(c, xs)]
    single = [d_function(c, x).d for x in xs]
    np.testing.assert_allclose(swept, single, atol=2e-11)


def test_mass_deficit():
    with pytest.raises(MassDeficit):
        d_function(parse_coefficient("exp(-x^2)"), 0.0, d_max=50.0)


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_d_is_one_lipschitz(x, y):
    c = catalog("one_plus_cos")
    assert abs(d_function(c, x).d - d_function(c, y).d) <= abs(x - y) + 1e-9


def test_q0_examples(coefs):
    assert q0_estimate(coefs["constant_one"], 1.0, 4.0, 0.25).inf_value == pytest.approx(2.0, abs=1e-13)
    est = q0_estimate(coefs["one_plus_cos"], math.pi / 2, 4 * math.pi, math.pi / 64)
    assert est.inf_value == pytest.approx(math.pi - 2, abs=1e-10)
    assert abs(abs(est.argmin_x) / math.pi % 2 - 1) < 1e-9
    full = q0_estimate(coefs["one_plus_cos"], math.pi, 4 * math.pi, math.pi / 64)
    assert full.inf_value == pytest.approx(2 * math.pi, abs=1e-10)


def test_d_sup_examples(coefs):
    assert d_sup_estimate(coefs["constant_one"], 4.0, 0.5) == pytest.approx(1.0, abs=1e-10)
    v = d_sup_estimate(coefs["one_plus_cos"], 4 * math.pi, math.pi / 64)
    assert math.pi / 2 < v <= math.pi
    c = coefs["exp_osc"]
    assert d_sup_estimate(c, 8.0, 0.25) == pytest.approx(d_function(c, 0.0).d, abs=1e-10)


def test_covering_constant_one(coefs):
    cov = r_covering(coefs["constant_one"], 0.0, 3)
    for k, s in enumerate(cov.segments):
        assert s.center == pytest.approx(2 * k + 1, abs=1e-10)
        assert s.radius == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("name", ["constant_one", "gaussian_osc", "exp_osc", "one_plus_cos"])
def test_covering_invariants(coefs, name):
    cov = r_covering(coefs[name], 0.0, 10)
    np.testing.assert_allclose(cov.masses(coefs[name]), 2.0, atol=1e-8)
    for s, t in zip(cov.segments, cov.segments[1:]):
        assert s.right == t.left


def test_covering_exp_osc_radii(coefs):
    cov = r_covering(coefs["exp_osc"], 0.0, 8)
    radii = [s.radius for s in cov.segments]
    assert all(b < a for a, b in zip(radii, radii[1:]))
    for s in cov.segments:
        if s.center >= 3:
            assert 0.9 <= s.radius * math.exp(s.center) <= 1.1


def test_shift_and_reflection(coefs):
    c = coefs["gaussian_osc"]
    assert mass(shifted(c, 0.5), 0.0, 1.0) == pytest.approx(mass(c, 0.0, 1.0) + 0.5, abs=1e-11)
    r = reflected(coefs["exp_osc"])
    assert mass(r, -2.0, -1.0) == pytest.approx(mass(coefs["exp_osc"], 1.0, 2.0), abs=1e-11)


def test_gaussian_osc_mass_oracle(coefs):
    assert mass(coefs["gaussian_osc"], 0.0, 0.5) == pytest.approx(ORACLE["gauss_osc_mass_0_half"], abs=1e-12)


def test_decay_floor_rejects_zero():
    with pytest.raises(NotSolvable):
        decay_floor(parse_coefficient("0*x"))
