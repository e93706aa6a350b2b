from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pbrigid.coeffs import make_field
from pbrigid.expmap import ExpMap, construct_family_I, identity_map, phi_degree, verify
from pbrigid.grading import (
    FiltrationDegree,
    GradingError,
    RelationNotHomogeneous,
    TrivialMap,
    ZeroElement,
    associated_graded_presentation,
    filtration_degree,
    homogenize_map,
    monomial_surface_gradings,
    rho,
    standard_grading,
)
from pbrigid.poly import Poly, WeightVector, parse_poly
from pbrigid.ring import make_pham_brieskorn, make_xr_plus_h


@pytest.mark.parametrize(
    "a, L, w",
    [((2, 3, 5), 30, (15, 10, 6)), ((2, 2, 3), 6, (3, 3, 2)), ((4, 4, 4), 4, (1, 1, 1)), ((2, 3, 4, 5), 60, (30, 20, 15, 12))],
)
def test_standard_grading(a, L, w):
    g = standard_grading(a)
    assert (g.L, g.weights) == (L, w)


@pytest.mark.parametrize("p", [0, 2, 5])
def test_standard_grading_makes_relation_homogeneous(p):
    a = (2, 3, 5)
    B = make_pham_brieskorn(make_field(p), a)
    g = standard_grading(a)
    assert B.relation.is_homogeneous(g.weight_vector())
    assert B.relation.weighted_degree(g.weight_vector()) == g.L


def test_standard_grading_rejects_bad_exponents():
    with pytest.raises(GradingError):
        standard_grading((2, 0, 3))


@pytest.fixture
def surface(Q):
    # x^3 + y^2 z^2 + y
    return make_xr_plus_h(Q, 3, parse_poly("X2^2 * X3^2 + X2", Q, 3))


def test_filtration_degree_example(surface):
    fd = FiltrationDegree(surface, (0, 3))
    assert fd.h_degree == 6 and fd.a == 2 and fd.scale == 1
    x, y, z = surface.gens()
    assert fd.degree(x) == 2
    assert fd.degree(y * x**2) == 4
    assert fd.degree(z**2 + y) == 6
    assert filtration_degree(surface, (0, 3), y**5) == 0
    with pytest.raises(ZeroElement):
        fd.degree(surface.zero())


def test_filtration_rescales_to_integer(Q):
    B = make_pham_brieskorn(Q, (2, 3, 5))
    fd = FiltrationDegree(B, (0, 1))
    # d(h) = 5 with r = 2: weights doubled, a = 5
    assert fd.scale == 2 and fd.a == 5
    assert fd.weights.weights == (5, 0, 2)
    graded, checked = associated_graded_presentation(B, (0, 1))
    assert checked and graded.relation == parse_poly("X1^2 + X3^5", Q, 3)


def test_filtration_agrees_with_standard_weights(Q):
    B = make_pham_brieskorn(Q, (2, 3, 5))
    fd = FiltrationDegree(B, (10, 6))
    assert fd.a == 15 and fd.scale == 1
    x, y, z = B.gens()
    w = standard_grading((2, 3, 5)).weight_vector()
    for g in [x, y * z, x * y + z**4, x**3]:
        assert fd.degree(g) == B.normal_form(g).weighted_degree(w)


def _elements(draw, pres, max_terms=3, max_exp=3):
    p = pres.field.characteristic
    coeff = st.integers(1, p - 1) if p else st.integers(-3, 3).filter(bool)
    exps = st.lists(st.integers(0, max_exp), min_size=pres.n, max_size=pres.n)
    terms = draw(st.lists(st.tuples(exps, coeff), min_size=1, max_size=max_terms))
    return pres.normal_form(Poly.from_terms(pres.field, pres.n, terms))


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_filtration_degree_is_additive_on_surface(data):
    field = make_field(data.draw(st.sampled_from([0, 5])))
    pres = make_xr_plus_h(field, 3, parse_poly("X2^2 * X3^2 + X2", field, 3))
    f = _elements(data.draw, pres)
    g = _elements(data.draw, pres)
    if not f or not g:
        return
    fd = FiltrationDegree(pres, (0, 3))
    assert fd.degree(pres.mul(f, g)) == fd.degree(f) + fd.degree(g)


def test_associated_graded_examples(Q, F5):
    surf = make_xr_plus_h(F5, 3, parse_poly("X2^2 * X3^2 + 2 * X2^4 + X2", F5, 3))
    graded, _ = associated_graded_presentation(surf, (0, 3))
    assert graded.relation == parse_poly("X1^3 + X2^2 * X3^2", F5, 3)

    trans = make_xr_plus_h(Q, 2, parse_poly("X2^3 + X3^5 + 7", Q, 3))
    graded, checked = associated_graded_presentation(trans, (10, 6))
    assert graded.relation == make_pham_brieskorn(Q, (2, 3, 5)).relation
    assert checked

    B = make_pham_brieskorn(Q, (2, 3, 5))
    graded, checked = associated_graded_presentation(B, (10, 6))
    assert graded.relation == B.relation and checked


def test_rho(Q):
    B = make_pham_brieskorn(Q, (2, 3, 5))
    w = standard_grading((2, 3, 5)).weights
    x, y, z = B.gens()
    assert rho(B, x + y**2, w) == y**2
    assert rho(B, x * y, w) == x * y
    with pytest.raises(ZeroElement):
        rho(B, B.zero(), w)
    with pytest.raises(RelationNotHomogeneous):
        rho(B, x, (1, 1, 1))


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_rho_is_multiplicative(data):
    field = make_field(data.draw(st.sampled_from([0, 7])))
    B = make_pham_brieskorn(field, (2, 3, 5))
    w = standard_grading((2, 3, 5)).weights
    f = _elements(data.draw, B)
    g = _elements(data.draw, B)
    if not f or not g:
        return
    assert rho(B, B.mul(f, g), w) == B.normal_form(rho(B, f, w) * rho(B, g, w))


def test_homogenize_homogeneous_map(F2):
    B = make_pham_brieskorn(F2, (2, 3, 4))
    phi = construct_family_I(B, 0, 2)
    hat, report = homogenize_map(phi)
    assert report.slope == -3
    assert sorted(report.achieved_by) == [(0, 2), (2, 1)]
    assert hat.images == phi.images
    assert report.homogeneous and report.nontrivial


def test_homogenize_non_homogeneous_map(F2):
    B = make_pham_brieskorn(F2, (2, 3, 4))
    x, y, z = B.gens()
    U = B.U()
    # conjugate of the translation map: x3 -> x3 + U + U^2
    phi = ExpMap(B, [x + U**2 + U**4, y, z + U + U**2])
    assert verify(phi).ok
    hat, report = homogenize_map(phi)
    assert report.slope == Fraction(-3, 2)
    assert hat.images == (x + U**4, y, z + U**2)
    assert report.homogeneous and report.nontrivial
    # x2 is invariant, and so is its leading form
    assert phi_degree(hat, rho(B, y, standard_grading((2, 3, 4)).weights)).invariant


def test_homogenize_errors(F2, Q):
    B = make_pham_brieskorn(F2, (2, 3, 4))
    with pytest.raises(TrivialMap):
        homogenize_map(identity_map(B))
    phi = construct_family_I(B, 0, 2)
    with pytest.raises(RelationNotHomogeneous):
        homogenize_map(phi, (1, 1, 1))


def test_monomial_surface_gradings(Q):
    pres = make_xr_plus_h(Q, 3, parse_poly("X2^2 * X3^2", Q, 3))
    g1, g2 = monomial_surface_gradings(3, 2, 2)
    assert g1 == WeightVector((2, 0, 3)) and g2 == WeightVector((2, 3, 0))
    for g in (g1, g2):
        assert pres.relation.is_homogeneous(g)
