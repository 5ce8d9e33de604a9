import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from vacalc import dsl
from vacalc.dsl import (
    Apply,
    Basis,
    BinOp,
    Delta,
    Delta3,
    Deriv,
    Neg,
    Num,
    Pair,
    Pow,
    Res,
    Taylor,
    Var,
    VOp,
    evaluate_text,
    parse_expr,
    unparse,
)
from vacalc.errors import ExprSyntaxError
from vacalc.examples import build_poly_mobius_lb
from vacalc.modules import Module
from vacalc.series import Window

names = st.sampled_from(["x", "y", "z", "x0", "x1", "x2", "d", "dx"])
ids = st.sampled_from(["1", "t", "t^2", "t*"])


def _exprs():
    leaves = st.one_of(
        st.builds(Num, st.integers(0, 99), st.booleans()),
        st.builds(Var, names),
        st.builds(Basis, ids),
        st.builds(Delta3, names, names, names, st.sampled_from([1, -1])),
    )

    def extend(inner):
        exps = st.one_of(st.builds(Num, st.integers(0, 9)), st.builds(lambda n: Neg(Num(n)), st.integers(1, 9)),
                         inner)
        vop = st.builds(VOp, inner, names, st.booleans())
        return st.one_of(
            st.builds(BinOp, st.sampled_from("+-*/"), inner, inner),
            st.builds(Neg, inner),
            st.builds(Pow, inner, exps),
            st.builds(Delta, inner),
            st.builds(Res, names, inner),
            st.builds(Deriv, names, inner),
            st.builds(Taylor, names, names, inner),
            vop,
            st.builds(Apply, vop, st.one_of(st.builds(Basis, ids), inner)),
            st.builds(Pair, inner, inner),
        )

    return st.recursive(leaves, extend, max_leaves=12)


@given(_exprs())
def test_print_parse_round_trip(e):
    text = unparse(e)
    assert parse_expr(text) == e
    assert unparse(parse_expr(text)) == text


@given(_exprs())
def test_whitespace_insensitive(e):
    text = unparse(e)
    # drop every space (keeping "/ " so a quotient never reads as d/dx), add newlines and tabs
    squeezed = text.replace(" / ", "\0").replace(" ", "").replace("\0", "/ ").replace("+", "\n+\t")
    assert parse_expr(squeezed) == e


def test_examples():
    e = parse_expr("Res_x2 ( x2^-1 * delta((x1-x0)/x2) )")
    assert isinstance(e, Res) and e.var == "x2"
    p = parse_expr("(x+y)^(1/2)")
    assert isinstance(p, Pow) and p.exp == BinOp("/", Num(1), Num(2))
    assert evaluate_text("1/2").coefficients() == {(): mpq(1, 2)}


def test_syntax_error_position():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("delta((x1-x2)/x0")
    err = info.value
    assert (err.line, err.column) == (1, 17)
    assert err.expected == "')'"
    assert err.found == "end of input"


def test_syntax_error_multiline():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("x +\n  * y")
    assert (info.value.line, info.value.column) == (2, 3)


@pytest.mark.parametrize("text", ["x +", "Res_x(", "delta3(x0, x1, x2)", "Taylor[y](x)", "<'t', x", "2 $ 3",
                                  "x^", "Y('t')"])
def test_rejects(text):
    with pytest.raises(ExprSyntaxError):
        parse_expr(text)


def test_evaluation_matches_library():
    w = Window.symmetric(4)
    a = evaluate_text("Res_x2(x2^-1 * delta((x1 - x0) / x2))")
    assert a.coefficients(w) == {(): mpq(1)}
    b = evaluate_text("d/dx(x^3 + 2 * x) / x")
    assert b.coefficients(w) == {(("x", mpq(-1)),): mpq(2), (("x", mpq(1)),): mpq(3)}
    c = evaluate_text("Taylor[y, x](x^-1)")
    d = evaluate_text("(x + y)^-1")
    assert c.equal_on(d, w) is None


def test_vertex_operators_need_structure():
    with pytest.raises(ValueError):
        evaluate_text("Y('t', x) 't'")


def test_vertex_operator_pairing():
    env = dsl.Env(Module.adjoint(build_poly_mobius_lb()), Window.symmetric(4))
    s = evaluate_text("<'t^4*', Y('t', x1) Y('t', x2) 't'>", env)
    assert s.coefficients() == {(("x1", mpq(1)),): mpq(1), (("x2", mpq(1)),): mpq(1)}
    o = evaluate_text("<'t*', Yo('1', x) 't'>", env)
    assert o.coefficients() == {(): mpq(1)}
