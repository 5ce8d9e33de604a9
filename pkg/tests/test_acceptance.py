"""Acceptance suite: one marked group of tests per criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import json
import random
import time
from fractions import Fraction

import pytest
from gmpy2 import mpq

import oracles
from vacalc import cli, lie
from vacalc.algebra import check_all, check_axioms, check_strong_grading, weight_shift_check
from vacalc.duality import Poly2, RationalFn, Region, check_duality, check_Pz_from_module, check_roundtrip, partial_sums
from vacalc.examples import (
    PRESETS,
    build_conformal_fixture,
    build_jordan_toy,
    build_poly_minus_d,
    build_poly_mobius_lb,
    build_trivial_module,
    build_two_dim,
    prove_no_sl2,
)
from vacalc.identities import three_term_sides, two_term_sides, verify_delta_identity
from vacalc.modules import Module, check_contragredient, check_opposite_identities, weight_formula_check
from vacalc.series import FormalSeries, Window, binom_expand, formal_taylor

W8 = Window.symmetric(8)


def crit(n, text):
    return pytest.mark.criterion(n, text)


# ---------------------------------------------------------------- 1


@crit(1, "delta identities on [-8,8], inequality witness, f(x)delta(x) on [-6,6], < 10 s")
def test_delta_suite():
    t0 = time.perf_counter()
    for kind in ("two_term", "three_term", "three_term_lhs_inequality"):
        r = verify_delta_identity(kind, W8)
        assert r.passed, r.render_text()
    # f(x)delta(x) = f(1)delta(x) is linear in f, so the 13 monomials settle every
    # Laurent polynomial with exponents in [-6, 6]; random combinations on top.
    for k in range(-6, 7):
        f = FormalSeries.var("x", k)
        assert verify_delta_identity("substitution", W8, f).passed
    rng = random.Random(7)
    for _ in range(20):
        f = FormalSeries.from_terms({(("x", mpq(k)),): mpq(rng.randint(-9, 9)) for k in range(-6, 7)})
        assert verify_delta_identity("substitution", W8, f).passed
    assert time.perf_counter() - t0 < 10


@crit(1, "delta identities on [-8,8], inequality witness, f(x)delta(x) on [-6,6], < 10 s")
def test_delta_sides_match_oracle():
    lhs, rhs = two_term_sides()
    assert oracles.as_dict(lhs, W8) == oracles.x_inv_delta("x2", "x1", "x0", -1, 8)
    assert oracles.as_dict(rhs, W8) == oracles.x_inv_delta("x1", "x2", "x0", 1, 8)
    t1, t2, rhs3 = three_term_sides()
    first, second, expect_rhs = oracles.three_term_sides(8)
    assert oracles.as_dict(t1, W8) == first
    assert oracles.as_dict(t2, W8) == second
    assert oracles.as_dict(rhs3, W8) == expect_rhs


@crit(1, "delta identities on [-8,8], inequality witness, f(x)delta(x) on [-6,6], < 10 s")
def test_inequality_witness_is_concrete():
    t1, t2, _ = three_term_sides()
    m = t1.equal_on(t2, W8)
    assert m is not None
    assert t1.coefficient(m) != t2.coefficient(m)


# ---------------------------------------------------------------- 2

LAMBDAS = [-3, -1, Fraction(-1, 2), 0, Fraction(1, 2), 2, Fraction(7, 3)]


@crit(2, "e^{y d/dx} x^lam = binom_expand(x, y, lam) on 12-coefficient windows")
@pytest.mark.parametrize("lam", LAMBDAS, ids=str)
def test_formal_taylor(lam):
    lam_q = mpq(lam.numerator, lam.denominator) if isinstance(lam, Fraction) else mpq(lam)
    window = Window((("x", (-30, 30)), ("y", (0, 11))))
    lhs = formal_taylor(FormalSeries.var("x", lam_q), "x", "y")
    rhs = binom_expand("x", "y", lam_q)
    a, b = oracles.as_dict(lhs, window), oracles.as_dict(rhs, window)
    assert a == b
    assert a == oracles.taylor_power(Fraction(lam), 11)


# ---------------------------------------------------------------- 3


@crit(3, "axiom suites: poly_minus_d, poly_mobius_lb (wt <= 8), two_dim + prove_no_sl2")
def test_poly_minus_d_axioms_but_not_strongly_graded():
    alg = build_poly_minus_d()
    r = check_axioms(alg, min_wt=-8, max_wt=0)
    assert r.passed, r.render_text()
    names = {x.name for x in r.results}
    assert {"vacuum", "creation", "jacobi", "sl2_brackets", "sl2_commutators", "L(-1)_derivative"} <= names
    strong = check_strong_grading(alg, min_wt=-8, max_wt=0)
    assert not strong.passed
    assert strong.failures()[0].witness


@crit(3, "axiom suites: poly_minus_d, poly_mobius_lb (wt <= 8), two_dim + prove_no_sl2")
def test_poly_mobius_lb_all_checks():
    r = check_all(build_poly_mobius_lb(), max_wt=8)
    assert r.passed, r.render_text()
    assert any(x.name.startswith("strong_grading.") for x in r.results)


@crit(3, "axiom suites: poly_minus_d, poly_mobius_lb (wt <= 8), two_dim + prove_no_sl2")
def test_two_dim_axioms_and_no_sl2():
    alg = build_two_dim()
    assert check_axioms(alg).passed
    r = prove_no_sl2(alg)
    assert r.status_of("no_sl2") == "pass"
    cert = r.results[0].coverage["certificate"]
    assert cert


# ---------------------------------------------------------------- 4


def _shipped_algebras():
    return {name: build() for name, build in PRESETS.items()}


@crit(4, "weight formula on 100% of windowed table entries of every shipped example")
@pytest.mark.parametrize("name", sorted(PRESETS))
def test_weight_formula_algebras(name):
    alg = PRESETS[name]()
    r = weight_shift_check(alg, max_wt=8)
    if alg.kind == "plain":
        # no L(0): the formula has nothing to say (see the weights note in the README)
        assert [x.status for x in r.results] == ["skip"]
        return
    assert r.passed, r.render_text()
    assert r.status_of("weight_formula") == "pass"
    assert r.status_of("L_weight") == "pass"


@crit(4, "weight formula on 100% of windowed table entries of every shipped example")
@pytest.mark.parametrize("build", [build_jordan_toy, build_trivial_module,
                                   lambda: Module.adjoint(build_poly_mobius_lb())], ids=["jordan", "trivial", "lb"])
def test_weight_formula_modules(build):
    r = weight_formula_check(build(), max_wt=8)
    assert r.passed, r.render_text()


# ---------------------------------------------------------------- 5


@crit(5, "opposite Jacobi, yo-L(-1), sl2 commutators; W'' = W; Y^o(omega)")
def test_opposite_identities_poly_mobius_lb():
    r = check_opposite_identities(Module.adjoint(build_poly_mobius_lb()), max_wt=8)
    assert r.passed, r.render_text()
    for name in ("opposite_jacobi", "yo_derivative", "sl2_opposite_1", "sl2_opposite_2", "sl2_opposite_3"):
        assert r.status_of(name) == "pass"


@crit(5, "opposite Jacobi, yo-L(-1), sl2 commutators; W'' = W; Y^o(omega)")
def test_double_contragredient():
    r = check_contragredient(Module.adjoint(build_poly_mobius_lb()), max_wt=8)
    assert r.passed, r.render_text()
    assert r.status_of("double_dual") == "pass"


@crit(5, "opposite Jacobi, yo-L(-1), sl2 commutators; W'' = W; Y^o(omega)")
def test_yo_omega_conformal():
    r = check_opposite_identities(Module.adjoint(build_conformal_fixture()))
    assert r.status_of("yo_omega") == "pass"


# ---------------------------------------------------------------- 6


@crit(6, "check_duality (t*,t,t,t) at window 10; 200 reconstruction round trips; < 60 s")
def test_duality_and_roundtrip():
    t0 = time.perf_counter()
    mod = Module.adjoint(build_poly_mobius_lb())
    r = check_duality(mod, "t*", "t", "t", "t", window=10)
    assert r.passed, r.render_text()
    assert len([x for x in r.results if x.status == "pass"]) == 5
    # every coefficient of the stated arguments vanishes, so also run a nonzero one
    nz = check_duality(mod, "t^4*", "t", "t", "t", window=10)
    assert nz.passed, nz.render_text()
    assert "f = ((1)*a^0*b^1 + (1)*a^1*b^0)" in nz.render_text()
    rt = check_roundtrip(200, (3, 3, 3, 4), seed=0)
    assert rt.passed, rt.render_text()
    assert time.perf_counter() - t0 < 60


# ---------------------------------------------------------------- 7


@crit(7, "iota expansions of 1/(x1-x2) converge within 2*2^-N at N = 10, 20, 30")
@pytest.mark.parametrize("tag,point,value", [("i12", (2, 1), 1), ("i21", (1, 2), -1)])
def test_convergence(tag, point, value):
    F = RationalFn(Poly2({(0, 0): mpq(1)}), 0, 0, 1)
    assert F.evaluate(*map(mpq, point)) == value
    rows = partial_sums(F, Region(tag), {"x1": mpq(point[0]), "x2": mpq(point[1])}, [10, 20, 30])
    for N, total, err in rows:
        assert err <= 2 * mpq(1, 2 ** N)
        if tag == "i12":
            assert oracles.as_fraction(total) == oracles.geometric_partial_sum(2, 1, N)
        else:
            # 1/(x1-x2) = -sum x1^n / x2^(n+1) for x2 big
            assert oracles.as_fraction(total) == -oracles.geometric_partial_sum(2, 1, N)


# ---------------------------------------------------------------- 8


@crit(8, "sl2 with three copies of V(1): embeddings, associativity_iso, coherence, 2x2 spins")
def test_lie_analogy():
    g = lie.sl2()
    V = lie.sl2_irrep(1, g)
    J1, J2 = lie.embed_inj("inj1", V, V, V), lie.embed_inj("inj2", V, V, V)
    for J in (J1, J2):
        assert lie.rank(J.matrix) == 8
        assert lie.check_embedding(J).passed
    assert lie.same_image(J1.matrix, J2.matrix)
    iso = lie.associativity_iso(V, V, V)
    r = lie.check_associativity_iso(iso, V, V, V)
    assert r.passed and r.results[0].coverage["triples"] == 8
    assert lie.check_coherence(V, V, V, V).passed
    assert lie.spins(lie.tensor_rep(V, V)) == {Fraction(1): 1, Fraction(0): 1}
    # float Casimir spectrum: 2j(j+1) for j = 1 (three times) and j = 0
    assert [round(x, 9) for x in oracles.casimir_eigs_float([2, 2])] == [0, 4, 4, 4]


# ---------------------------------------------------------------- 9


@crit(9, "P(z) intertwining Jacobi identity at z = 1 and 1/2, window 6")
@pytest.mark.parametrize("z", [mpq(1), mpq(1, 2)], ids=["1", "1/2"])
def test_pz(z):
    r = check_Pz_from_module(Module.adjoint(build_poly_mobius_lb()), z, window=6)
    assert r.passed, r.render_text()


# ---------------------------------------------------------------- 10


@crit(10, "negative controls fail with a witness and exit code 1")
@pytest.mark.parametrize("fixture", ["broken_jacobi.json", "broken_opposite_sign.json", "broken_lie_map.json"])
def test_negative_controls(fixture, fixtures_dir, capsys):
    code = cli.main(["check", str(fixtures_dir / fixture), "--report", "json"])
    report = json.loads(capsys.readouterr().out)
    assert code == 1
    assert not report["passed"]
    assert report["witnesses"]
    assert all(w.get("check") for w in report["witnesses"])
