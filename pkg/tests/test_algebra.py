from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import oracles
from vacalc.algebra import check_axioms, check_jacobi_triple, commutator_formula_check, vertex_op
from vacalc.errors import SpecInvalid
from vacalc.examples import (
    CommAlgSpec,
    build_comm_alg_va,
    build_conformal_fixture,
    build_poly_minus_d,
    build_poly_mobius_lb,
    build_two_dim,
    conformal_vector_search,
    derivation_of,
    prove_no_sl2,
    t_id,
)
from vacalc.grading import Vector
from vacalc.series import Window

LB = build_poly_mobius_lb()
MD = build_poly_minus_d()


def _as_power(vec):
    (bid, c), = vec.c.items()
    return (0 if bid == "1" else 1 if bid == "t" else int(bid[2:])), oracles.as_fraction(c)


@given(st.integers(0, 6), st.integers(-8, 2), st.integers(0, 6))
def test_lb_modes_match_closed_form(k, n, m):
    got = LB.mode(Vector.basis(t_id(k)), n, Vector.basis(t_id(m)))
    expect = oracles.mobius_lb_mode(k, n, m)
    if expect is None or expect[1] == 0:
        assert got.is_zero()
    else:
        assert _as_power(got) == expect


@given(st.integers(0, 6), st.integers(-8, 2), st.integers(0, 6))
def test_minus_d_modes_match_closed_form(k, n, m):
    got = MD.mode(Vector.basis(t_id(k)), n, Vector.basis(t_id(m)))
    expect = oracles.minus_d_mode(k, n, m)
    if expect is None:
        assert got.is_zero()
    else:
        assert _as_power(got) == expect


@pytest.mark.parametrize("j", [-1, 0, 1])
def test_lb_sl2_operators(j):
    for k in range(6):
        got = LB.L(j, Vector.basis(t_id(k)))
        expect = oracles.lb_sl2(j, k)
        if expect is None:
            assert got.is_zero()
        else:
            assert _as_power(got) == expect


def test_vertex_op_is_generating_series():
    s = vertex_op(LB, Vector.basis("t"), Vector.basis("1"), Window.symmetric(4), "x")
    # Y(t, x)1 = t / (1 - x t) = sum_j x^j t^(j+1)
    got = {int(dict(m).get("x", 0)): v for m, v in s.coefficients(Window.symmetric(4)).items()}
    assert got == {j: Vector.basis(t_id(j + 1)) for j in range(5)}


@given(st.sampled_from(["1", "t", "t^2", "t^3"]), st.sampled_from(["1", "t", "t^2"]),
       st.sampled_from(["1", "t", "t^2"]))
def test_jacobi_random_triples(u, v, w):
    assert check_jacobi_triple(LB, u, v, w, Window.symmetric(3)).passed


def test_commutator_formula():
    assert commutator_formula_check(LB, "t", "t^2", "t", Window.symmetric(3)).passed


def test_derivation_recovered_from_modes():
    assert derivation_of(LB, "t^3") == Vector.basis("t^4", 3)
    assert derivation_of(MD, "t^3") == Vector.basis("t^2", -3)


def test_two_dim_has_no_sl2_certificate():
    r = prove_no_sl2(build_two_dim())
    cert = r.results[0].coverage["certificate"]
    # the combination only uses the [L(0), L(-1)] = L(-1) constraint at (a, a): 0 = 1
    assert set(cert) == {"[L(0),L(-1)]=L(-1) at (a,a)"}
    assert Fraction(cert["[L(0),L(-1)]=L(-1) at (a,a)"]) != 0


def test_feasible_sl2_found_for_trivial_derivation():
    spec = CommAlgSpec(("1", "e"), "1", {("1", "1"): Vector.basis("1"), ("1", "e"): Vector.basis("e"),
                                         ("e", "1"): Vector.basis("e")})
    r = prove_no_sl2(build_comm_alg_va(spec))
    assert r.status_of("sl2_feasible") == "pass"


def test_conformal_vector_obstruction():
    assert conformal_vector_search(build_two_dim()).passed
    assert not conformal_vector_search(build_conformal_fixture()).passed


def test_invalid_specs_rejected():
    one, a, b = Vector.basis("1"), Vector.basis("a"), Vector.basis("b")
    unit_rows = {("1", "1"): one, ("1", "a"): a, ("a", "1"): a, ("1", "b"): b, ("b", "1"): b}
    noncommutative = CommAlgSpec(("1", "a", "b"), "1", {**unit_rows, ("a", "b"): a})
    with pytest.raises(SpecInvalid, match="commutative"):
        noncommutative.validate()
    # a^2 = 0 but D a = 1 gives D(a a) = 0 != 2a
    leibniz = CommAlgSpec(("1", "a"), "1", {k: v for k, v in unit_rows.items() if "b" not in k}, {"a": one})
    with pytest.raises(SpecInvalid, match="Leibniz"):
        leibniz.validate()


def test_plain_axioms_on_two_dim():
    r = check_axioms(build_two_dim())
    assert r.passed
    assert {x.name for x in r.results} == {"vacuum", "creation", "jacobi", "lower_truncation"}
