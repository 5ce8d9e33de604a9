import random

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

import oracles
from vacalc.duality import (
    Poly2,
    RationalFn,
    Region,
    check_duality,
    check_Pz_from_module,
    equal_as_rational,
    eval_partial,
    fit_window,
    iota_expand,
    iota_expand_kernel,
    matrix_coeff,
    partial_sums,
    random_ratfn,
    reconstruct_rational,
    series_dict,
)
from vacalc.errors import AmbiguousFit, NoFit, PoleHit
from vacalc.examples import build_poly_mobius_lb
from vacalc.modules import Module, contragredient
from vacalc.series import Window
from vacalc.tables import ingest_table

MOD = Module.adjoint(build_poly_mobius_lb())
DUAL = contragredient(MOD, 8)

ratfns = st.builds(
    lambda g, r, s, t: RationalFn(Poly2({k: mpq(v) for k, v in g.items()}), r, s, t),
    st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2)), st.integers(-4, 4).filter(bool),
                    min_size=1, max_size=4),
    st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))


def _frac_dict(d):
    return {k: oracles.as_fraction(v) for k, v in d.items()}


@given(ratfns)
def test_iota12_against_convolution_oracle(F):
    w = Window((("x1", (-8, 6)), ("x2", (-6, 6))))
    g = {k: oracles.as_fraction(v) for k, v in F.g.c.items()}
    got = _frac_dict(series_dict(iota_expand(F, Region("i12"), w), F.variables, w))
    assert got == oracles.iota12(g, F.r, F.s, F.t, ((-8, 6), (-6, 6)))


@given(ratfns)
def test_iota21_against_convolution_oracle(F):
    w = Window((("x1", (-6, 6)), ("x2", (-8, 6))))
    g = {k: oracles.as_fraction(v) for k, v in F.g.c.items()}
    got = _frac_dict(series_dict(iota_expand(F, Region("i21"), w), F.variables, w))
    assert got == oracles.iota21(g, F.r, F.s, F.t, ((-6, 6), (-8, 6)))


@given(st.sampled_from(["i12", "i21", "i20", "i02"]), st.integers(0, 10 ** 6))
def test_reconstruction_round_trip(tag, seed):
    region = Region(tag)
    F = random_ratfn(random.Random(seed), region, (3, 3, 3, 4))
    w = fit_window((3, 3, 3, 4), region)
    S = iota_expand(F, region, w)
    assert S.equal_on(iota_expand_kernel(F, region), w) is None
    assert reconstruct_rational(S, region, (3, 3, 3, 4), w) == F


def test_escalation_without_bounds():
    F = RationalFn(Poly2({(0, 0): mpq(1), (1, 1): mpq(-2)}), 1, 0, 2)
    w = fit_window((4, 4, 4, 16), Region("i12"))
    assert reconstruct_rational(iota_expand(F, Region("i12"), w), Region("i12"), None, w) == F


def test_small_window_is_ambiguous():
    F = RationalFn(Poly2({(0, 0): mpq(1)}), 0, 0, 1)
    w = Window.symmetric(2)
    with pytest.raises(AmbiguousFit):
        reconstruct_rational(iota_expand(F, Region("i12"), w), Region("i12"), (3, 3, 3, 4), w)


def test_series_outside_bounds_has_no_fit():
    F = RationalFn(Poly2({(0, 0): mpq(1)}), 0, 0, 3)
    w = fit_window((1, 1, 1, 2), Region("i12"))
    with pytest.raises(NoFit):
        reconstruct_rational(iota_expand(F, Region("i12"), w), Region("i12"), (1, 1, 1, 2), w)


def test_non_rational_series_has_no_fit():
    w = fit_window((2, 2, 2, 2), Region("i12"))
    # sum_n x2^n x1^(-n^2) is not the expansion of a rational function
    terms = {(-n * n, n): mpq(1) for n in range(0, 4)}
    with pytest.raises(NoFit):
        reconstruct_rational(terms, Region("i12"), (2, 2, 2, 2), w)


def test_canonical_form_cancels():
    # x1 (x1 - x2) / (x1^2 (x1 - x2)^2) = 1 / (x1 (x1 - x2))
    g = Poly2({(2, 0): mpq(1), (1, 1): mpq(-1)})
    F = RationalFn(g, 2, 0, 2)
    assert (F.r, F.s, F.t) == (1, 0, 1)
    assert F.g == Poly2({(0, 0): mpq(1)})


def test_equal_as_rational():
    f = RationalFn(Poly2({(0, 0): mpq(1)}), 1, 1, 0)
    # 1/(x1 x2) = h(x1 - x2, x2) with h(x0, x2) = 1/((x0 + x2) x2)
    h = RationalFn(Poly2({(0, 0): mpq(1)}), 0, 1, 1, ("x0", "x2"), 1)
    assert equal_as_rational(f, h) is None
    wrong = RationalFn(Poly2({(0, 0): mpq(2)}), 0, 1, 1, ("x0", "x2"), 1)
    assert equal_as_rational(f, wrong) is not None


def test_pole_hit():
    F = RationalFn(Poly2({(0, 0): mpq(1)}), 0, 0, 1)
    with pytest.raises(PoleHit):
        F.evaluate(mpq(1), mpq(1))
    with pytest.raises(PoleHit):
        partial_sums(F, Region("i12"), {"x1": mpq(3), "x2": mpq(3)}, [5])


def test_eval_partial_substitutes_point():
    F = RationalFn(Poly2({(0, 0): mpq(1)}), 0, 0, 1)
    w = Window((("x1", (-20, 0)), ("x2", (0, 20))))
    S = iota_expand(F, Region("i12"), w)
    val = eval_partial(S, {"x1": mpq(2), "x2": mpq(1)}, w, F)
    assert abs(val - 1) <= mpq(1, 2 ** 19)


def test_adjoint_matrix_coefficients_match_hand_values():
    # Y(t, x2) t = sum_j x2^j t^(j+2), then Y(t, x1) t^(j+2) = sum_i x1^i t^(i+j+3)
    w = Window.symmetric(4)
    s3 = matrix_coeff(MOD, "product", "t^3*", "t", "t", "t", w)
    s4 = matrix_coeff(MOD, "product", "t^4*", "t", "t", "t", w)
    assert series_dict(s3, ("x1", "x2"), w) == {(0, 0): 1}
    assert series_dict(s4, ("x1", "x2"), w) == {(1, 0): 1, (0, 1): 1}


def test_contragredient_duality_nontrivial():
    # <t*, Y'(t,x1) Y'(t,x2) t*> pairs into Y(-x^-2 (t + x), x^-1) twice: 1/(x1 x2)
    r = check_duality(DUAL, "t", "t", "t", "t*", window=10)
    assert r.passed, r.render_text()
    assert "f = ((1)*a^0*b^0) / (x1^1 x2^1" in r.results[0].detail


def test_broken_associativity_detected(fixtures_dir):
    mod = ingest_table(fixtures_dir / "broken_associativity.json")
    r = check_duality(mod, "a2*", "a", "a", "1", window=10)
    assert r.status_of("associativity") == "fail"
    w = r.failures()[0].witness
    assert w["lhs"] != w["rhs"]


def test_pz_detects_wrong_sign(monkeypatch):
    import vacalc.duality as duality

    original = duality.pz_sides

    def flipped(*args, **kw):
        a, bc = original(*args, **kw)
        return a, bc * mpq(-1)

    monkeypatch.setattr(duality, "pz_sides", flipped)
    r = check_Pz_from_module(MOD, 1, window=3, max_wt=3, sample_wt=1)
    assert not r.passed
