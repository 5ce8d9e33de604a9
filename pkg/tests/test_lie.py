from fractions import Fraction

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

import oracles
from vacalc import lie
from vacalc.errors import NotAHomomorphism, VacalcError

G = lie.sl2()
V = lie.sl2_irrep(1, G)


@given(st.integers(0, 3), st.integers(0, 3))
@settings(max_examples=12)
def test_clebsch_gordan_spins(a, b):
    T = lie.tensor_rep(lie.sl2_irrep(a, G), lie.sl2_irrep(b, G))
    expect = {Fraction(j, 2): 1 for j in range(abs(a - b), a + b + 1, 2)}
    assert lie.spins(T) == expect
    eigs = oracles.casimir_eigs_float([a + 1, b + 1])
    from_spins = sorted(float(2 * j * (j + 1)) for j, m in expect.items() for _ in range(int(2 * j + 1) * m))
    assert np.allclose(eigs, from_spins)


def test_irrep_is_homomorphism():
    for n in range(5):
        lie.sl2_irrep(n, G).validate()


def test_bad_rep_rejected():
    e, f, h = (m.copy() for m in V.matrices)
    with pytest.raises((NotAHomomorphism, VacalcError)):
        lie.LieAlgebraRep(G, [e, f, h * mpq(2)], "bad").validate()


def test_jacobi_violation_rejected():
    c = G.c.copy()
    c[0, 1, 2], c[1, 0, 2] = mpq(3), mpq(-3)
    c[0, 1, 0], c[1, 0, 0] = mpq(1), mpq(-1)
    with pytest.raises(VacalcError):
        lie.LieAlgebra(c, ["e", "f", "h"], "broken")


def test_box_map_is_intertwining():
    T, box = lie.tensor_diag(V, V)
    assert lie.check_intertwining(box, V, V, T).passed


def test_non_intertwining_map_has_witness():
    T = lie.tensor_rep(V, V)
    M = lie.eye(4)
    M[0, 1] = mpq(1)
    r = lie.check_intertwining(lie.IntertwiningMapLie(M, (V, V), T, "bad"), V, V, T)
    assert not r.passed
    assert r.failures()[0].witness["inputs"]


def test_contragredient_of_irrep_is_isomorphic():
    D = lie.contragredient_rep(V)
    assert lie.find_isomorphism(V, D) is not None
    back = lie.contragredient_rep(D)
    assert all((a == b).all() for a, b in zip(back.matrices, V.matrices))


def test_hom_space_dimension_is_multiplicity():
    # Hom(V(1) x V(1), V(2)) is one dimensional, Hom(V(1) x V(1), V(1)) is zero
    T = lie.tensor_rep(V, V)
    assert len(lie.hom_space(T, lie.sl2_irrep(2, G))) == 1
    assert len(lie.hom_space(T, V)) == 0


def test_road_map_and_factorization():
    assert lie.check_road_map(V, V, V).passed
    W = lie.sl2_irrep(2, G)
    assert lie.check_road_map(V, W, V).passed
    T3 = lie.tensor_rep(V, V, V)
    F = lie.IntertwiningMapLie(lie.eye(8), (V, V, V), T3, "F")
    _, _, report = lie.factorize(F, V, V, V)
    assert report.passed, report.render_text()


def test_coherence_mixed_dimensions():
    assert lie.check_coherence(V, lie.sl2_irrep(2, G), V, lie.trivial_rep(G)).passed


def test_json_round_trip():
    data = lie.lie_to_json(G, [V, lie.sl2_irrep(2, G)])
    alg, reps, maps = lie.lie_from_json(data)
    assert lie.lie_to_json(alg, reps, maps) == data
