import pytest
from hypothesis import given, strategies as st

import oracles
from vacalc.algebra import act
from vacalc.examples import (JordanCells, build_conformal_fixture, build_jordan_toy, build_poly_mobius_lb, jordan_id,
                             nilpotent_part, t_id)
from vacalc.grading import Space, Vector, pair
from vacalc.modules import (
    Module,
    ModuleMap,
    check_module,
    check_opposite_identities,
    compare_modules,
    contragredient,
    dual_hom,
    opposite_op,
    semisimple_part_check,
)
from vacalc.series import Window
from vacalc.tables import ingest_table

LB = build_poly_mobius_lb()
MOD = Module.adjoint(LB)
DUAL = contragredient(MOD, 8)


def _power(bid):
    return 0 if bid == "1" else 1 if bid == "t" else int(bid[2:])


@given(st.integers(0, 4), st.integers(0, 4))
def test_opposite_matches_oracle(k, m):
    w = Window.symmetric(7)
    s = opposite_op(MOD, Vector.basis(t_id(k)), Vector.basis(t_id(m)), w)
    got = {}
    for mono, vec in s.coefficients(w).items():
        e = int(dict(mono).get("x", 0))
        got[e] = {_power(b): oracles.as_fraction(c) for b, c in vec.c.items()}
    assert got == oracles.yo_lb(k, m, -7)


@given(st.integers(0, 3), st.integers(-6, 3), st.integers(0, 5), st.integers(0, 5))
def test_contragredient_is_adjoint_of_opposite(k, n, m, p):
    # <v'_n w', w> = <w', v^o_n w>
    v = Vector.basis(t_id(k))
    lhs = pair(act(DUAL.modes, v, n, Vector.basis(t_id(m) + "*")), Vector.basis(t_id(p)))
    rhs = pair(Vector.basis(t_id(m) + "*"), act(MOD.opposite, v, n, Vector.basis(t_id(p))))
    assert lhs == rhs


def test_double_dual_equals_original():
    assert compare_modules(contragredient(DUAL, 8), MOD, max_wt=6).passed


def test_dual_weights_flip_and_keep_weight():
    for b in ("1", "t", "t^3"):
        d = DUAL.space.basis(b + "*")
        assert d.weight == MOD.space.weight(b)


def test_conformal_fixture_module_checks():
    r = check_module(Module.adjoint(build_conformal_fixture()))
    assert r.passed, r.render_text()
    assert r.status_of("opposite.yo_omega") == "pass"


def test_jordan_toy_generalized_module():
    r = check_module(build_jordan_toy(), max_wt=4)
    assert r.passed, r.render_text()


def test_jordan_toy_fails_as_ordinary_module():
    toy = build_jordan_toy()
    ordinary = Module(toy.algebra, Space(0, generator=JordanCells(0), generalized=False, lower_bounded=True),
                      toy.modes, toy.sl2, name="jordan as ordinary")
    r = check_module(ordinary, max_wt=4)
    assert [x.name for x in r.failures()] == ["axioms.weight_condition"]


def test_dual_of_nilpotent_part_is_transpose():
    toy = build_jordan_toy()
    g = dual_hom(ModuleMap(toy, toy, nilpotent_part(toy)), max_wt=4)
    # N w_{k,1} = w_{k,0}, so N' w_{k,0}* = w_{k,1}* and N' w_{k,1}* = 0
    for k in range(4):
        assert g(Vector.basis(jordan_id(k, 0) + "*")) == Vector.basis(jordan_id(k, 1) + "*")
        assert g(Vector.basis(jordan_id(k, 1) + "*")).is_zero()


def test_jordan_toy_corruption_detected():
    r = semisimple_part_check(build_jordan_toy(corrupt=True), max_wt=4)
    assert not r.passed
    assert r.failures()[0].witness


def test_dropped_opposite_sign_fails(fixtures_dir):
    mod = ingest_table(fixtures_dir / "broken_opposite_sign.json")
    r = check_opposite_identities(mod, max_wt=3)
    assert not r.passed
    bad = r.failures()[0]
    assert bad.witness["lhs"] != bad.witness["rhs"]


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_opposite_lower_truncation(k):
    # Y^o(v, x) w lies in W((x^-1)); the top power is x^-wt(v)
    s = opposite_op(MOD, Vector.basis(t_id(k)), Vector.basis("t"), Window.symmetric(6))
    exps = [int(dict(m).get("x", 0)) for m in s.coefficients(Window.symmetric(6))]
    assert max(exps) == max(oracles.yo_lb(k, 1, -6)) == -k
