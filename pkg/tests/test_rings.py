from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvedchern.errors import Inhomogeneous, InvalidInput
from curvedchern.rings import GradedRing, ring_mul, ring_normal_form
from curvedchern.scalars import Scalar

from util import qi_ring, sphere_ring


def _random_poly(ring, seed_terms):
    # seed_terms: list of (exponent tuple, small int coeff)
    p = ring.zero()
    for exps, c in seed_terms:
        exps = tuple(e % 3 for e in exps)[: ring.nvars]
        exps = exps + (0,) * (ring.nvars - len(exps))
        p = p + ring.element({exps: Scalar(c)})
    return p


def test_parser_round_trip():
    R = qi_ring("x", "y")
    p = R.from_string("(1-x)^2*(x*y+2) - 3/2*y + i*x")
    assert p == R.from_string(str(p))


def test_parser_unicode_minus_and_unary():
    R = qi_ring("x")
    assert R.from_string("−2*x") == R.from_string("-2*x")
    assert R.from_string("-(x-1)") == R.from_string("1-x")


def test_parser_rejects_garbage():
    R = qi_ring("x")
    for bad in ["x +", "(x", "x^y", "x$", "", "x/y"]:
        with pytest.raises(InvalidInput):
            R.from_string(bad)


def test_reserved_names_rejected():
    with pytest.raises(InvalidInput):
        GradedRing(["i"], [0], grading="Z2")
    with pytest.raises(InvalidInput):
        GradedRing(["u"], [0], grading="Z2")


def test_odd_ring_degree_rejected():
    with pytest.raises(InvalidInput):
        GradedRing(["x"], [1], grading="Z")


def test_gamma_degree_weighted():
    R = GradedRing(["x", "T"], [0, 2], grading="Z")
    assert R.from_string("x^5*T^3").gamma_degree() == 6
    assert R.from_string("x^2+T").gamma_degree(strict=False) is None
    with pytest.raises(Inhomogeneous):
        R.from_string("x^2+T").gamma_degree()


def test_z2_everything_is_even():
    R = sphere_ring(3)
    assert R.from_string("x1*x2+x3+1").gamma_degree() == 0


def test_relation_normal_form_sphere():
    R = sphere_ring(3)
    # x1^2 reduces to 1 - x2^2 - x3^2 (leading monomial of the relation is x1^2)
    assert R.from_string("x1^2") == R.from_string("1-x2^2-x3^2")
    assert R.from_string("x1^2+x2^2+x3^2-1").is_zero()
    # normal form is canonical: equal elements have equal term dicts
    a = R.from_string("x1^3")
    b = R.from_string("x1*(1-x2^2-x3^2)")
    assert a == b and a.terms == b.terms


def test_relation_must_be_degree_zero():
    with pytest.raises(InvalidInput):
        GradedRing(["x", "T"], [0, 2], grading="Z", relation="T-1")


def test_derivative_on_representatives():
    R = qi_ring("x", "y")
    p = R.from_string("x^3*y - 2*x")
    assert p.derivative("x") == R.from_string("3*x^2*y - 2")
    assert p.derivative("y") == R.from_string("x^3")


def test_named_entry_points():
    R = qi_ring("x")
    p = ring_normal_form("x^2-1", R)
    assert ring_mul(p, p) == R.from_string("(x^2-1)^2")
    assert ring_normal_form({(1,): Scalar(2)}, R) == R.from_string("2*x")


small_ints = st.integers(min_value=-4, max_value=4)
term_lists = st.lists(
    st.tuples(st.tuples(small_ints, small_ints), small_ints), max_size=5
)


@given(term_lists, term_lists)
def test_mul_commutes_with_relation_nf(ta, tb):
    # multiplying then reducing equals reducing then multiplying
    R = GradedRing(["x", "y"], [0, 0], grading="Z2", relation="x^2+y^2-1")
    F = GradedRing(["x", "y"], [0, 0], grading="Z2")
    a, b = _random_poly(F, ta), _random_poly(F, tb)
    image = lambda p: R.element(dict(p.terms))  # noqa: E731
    assert image(a * b) == image(a) * image(b)


@given(term_lists, term_lists, term_lists)
def test_ring_laws(ta, tb, tc):
    R = qi_ring("x", "y")
    a, b, c = (_random_poly(R, t) for t in (ta, tb, tc))
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)


@given(term_lists)
def test_leibniz_relation_free(ta):
    R = qi_ring("x", "y")
    a = _random_poly(R, ta)
    b = R.from_string("x*y+1")
    lhs = (a * b).derivative("x")
    rhs = a.derivative("x") * b + a * b.derivative("x")
    assert lhs == rhs
