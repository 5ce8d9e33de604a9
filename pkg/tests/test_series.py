from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

import oracles
from vacalc.errors import UndefinedProduct, VariableCollision
from vacalc.scalar import ONE, binomial, from_json, parse_scalar, scalar, to_json
from vacalc.series import (
    FormalSeries,
    Window,
    binom_expand,
    delta,
    delta_ratio,
    derivative,
    evaluate,
    formal_taylor,
    multiply,
    residue,
    series_from_json,
    series_to_json,
    substitute_binomial,
)

W6 = Window.symmetric(6)

laurent = st.dictionaries(st.integers(-4, 4), st.integers(-5, 5), max_size=5).map(
    lambda d: FormalSeries.from_terms({(("x", mpq(k)),): mpq(c) for k, c in d.items()}))
laurent2 = st.dictionaries(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), st.integers(-5, 5), max_size=5).map(
    lambda d: FormalSeries.from_terms({(("x", mpq(i)), ("y", mpq(j))): mpq(c) for (i, j), c in d.items()}))
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def test_binomial_matches_falling_factorial():
    for lam in (-3, Fraction(-1, 2), Fraction(7, 3), 5):
        for k in range(8):
            q = mpq(lam.numerator, lam.denominator) if isinstance(lam, Fraction) else mpq(lam)
            assert oracles.as_fraction(binomial(q, k)) == oracles.gbinom(lam, k)


def test_scalar_json_round_trip():
    for x in (mpq(3, 4), mpq(-2), scalar(1, -2), scalar(mpq(1, 2), 3)):
        assert from_json(to_json(x)) == x
    assert parse_scalar("1/2-3i") == scalar(mpq(1, 2), -3)
    assert from_json("5/6") == mpq(5, 6)


def test_delta_is_all_integer_powers():
    c = delta("x").coefficients(Window.symmetric(3))
    assert sorted(int(dict(m).get("x", 0)) for m in c) == list(range(-3, 4))
    assert set(c.values()) == {ONE}


def test_binom_expand_against_oracle():
    s = binom_expand("x", (mpq(-1), "y"), -2)
    got = oracles.as_dict(s, Window((("x", (-10, 10)), ("y", (0, 6)))))
    expect = {oracles.mono(x=-2 - j, y=j): oracles.gbinom(-2, j) * (-1) ** j for j in range(7)}
    assert got == expect


def test_residue_picks_minus_one_coefficient():
    f = FormalSeries.from_terms({(("x", mpq(-1)), ("y", mpq(2))): mpq(3), (("x", mpq(1)),): ONE})
    assert residue(f, "x").coefficients() == {(("y", mpq(2)),): mpq(3)}


def test_taylor_collision():
    with pytest.raises(VariableCollision):
        formal_taylor(FormalSeries.var("x", 2) * FormalSeries.var("y"), "x", "y")


def test_undefined_product_is_rejected():
    # delta(x) * delta(x) has infinitely many contributions to each coefficient
    with pytest.raises(UndefinedProduct):
        multiply(delta("x"), delta("x"))


def test_delta_ratio_scaled():
    # delta(2x/y): coefficient of x^n y^-n is 2^n
    s = delta_ratio([(mpq(2), "x")], "y")
    got = oracles.as_dict(s, Window.symmetric(4))
    assert got == {oracles.mono(x=n, y=-n): Fraction(2) ** n for n in range(-4, 5)}


def test_series_json_round_trip():
    s = binom_expand("x", "y", mpq(1, 2))
    data = series_to_json(s, Window.symmetric(4))
    assert series_to_json(series_from_json(data), Window.symmetric(4)) == data


@given(laurent, laurent)
def test_multiply_commutes(f, g):
    assert multiply(f, g).equal_on(multiply(g, f), W6) is None


@given(laurent, laurent, laurent)
def test_multiply_associates(f, g, h):
    assert multiply(multiply(f, g), h).equal_on(multiply(f, multiply(g, h)), Window.symmetric(12)) is None


@given(laurent, laurent)
def test_leibniz(f, g):
    lhs = derivative(multiply(f, g), "x")
    rhs = multiply(derivative(f, "x"), g) + multiply(f, derivative(g, "x"))
    assert lhs.equal_on(rhs, Window.symmetric(10)) is None


@given(laurent2)
def test_residue_of_derivative_vanishes(f):
    assert residue(derivative(f, "x"), "x").coefficients() == {}


@given(laurent)
def test_delta_substitution(f):
    lhs = multiply(f, delta("x"))
    rhs = delta("x").scale(evaluate(f, {"x": ONE}))
    assert lhs.equal_on(rhs, W6) is None


@given(rationals, st.integers(0, 6))
def test_taylor_is_binomial(lam, k):
    q = mpq(lam.numerator, lam.denominator)
    s = formal_taylor(FormalSeries.var("x", q), "x", "y")
    m = (("x", q - k), ("y", mpq(k))) if k else (("x", q),)
    if q == k:
        m = (("y", mpq(k)),)
    assert oracles.as_fraction(s.coefficient(m)) == oracles.gbinom(lam, k)


@given(laurent2)
def test_substitute_binomial_is_taylor_on_polynomials(f):
    # f(x + y) expanded in nonnegative powers of y is e^{y d/dx} f(x)
    g = f.scale(ONE)
    renamed = FormalSeries.from_terms({tuple(("z" if v == "y" else v, e) for v, e in m): c
                                       for m, c in g.coefficients().items()})
    lhs = substitute_binomial(renamed, "x", "x", "y")
    rhs = formal_taylor(renamed, "x", "y")
    assert lhs.equal_on(rhs, Window.symmetric(8)) is None
