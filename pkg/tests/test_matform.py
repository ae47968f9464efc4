from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvedchern.errors import InvalidInput
from curvedchern.forms import DiffForm, USeries, de_rham_d
from curvedchern.matform import Mat, jd_column
from curvedchern.scalars import Scalar

from util import qi_ring


def _ring2():
    return qi_ring("x", "y")


def test_from_stored_is_transpose_for_ring_entries():
    R = _ring2()
    m = Mat.from_stored(R, [0, 1], [["0", "x"], ["y", "0"]])
    assert m.entry(0, 1) == USeries.from_ring(R.from_string("y"))
    assert m.entry(1, 0) == USeries.from_ring(R.from_string("x"))
    assert m.entry(0, 0).is_zero() and m.entry(1, 1).is_zero()


def test_display_round_trip_with_forms():
    R = _ring2()
    dx = DiffForm.d_var(R, "x")
    dy = DiffForm.d_var(R, "y")
    # internal matrix with a one-form in an odd row picks up the twist
    m = Mat(
        R,
        [0, 1],
        [0, 1],
        [
            [USeries.zero(R), USeries.from_form(dy)],
            [USeries.from_form(dx).scale(Scalar(-1)), USeries.zero(R)],
        ],
    )
    disp = m.display()
    assert disp[0][1] == USeries.from_form(dx)  # (-1)^{|e_1|} * (-dx)
    assert disp[1][0] == USeries.from_form(dy)
    again = Mat.from_stored(R, [0, 1], disp)
    assert again == m


def test_composition_is_plain_product():
    R = _ring2()
    a = Mat.from_stored(R, [0, 1], [["0", "x"], ["y", "0"]])
    sq = a @ a
    assert sq.entry(0, 0) == USeries.from_ring(R.from_string("x*y"))
    assert sq.entry(1, 1) == USeries.from_ring(R.from_string("x*y"))


def test_degree_rule_checks():
    R = qi_ring("x", "T", degrees=[0, 2], grading="Z")
    delta = Mat.from_stored(R, [0, 1], [["0", "x"], ["x*T", "0"]])
    assert delta.has_operator_degree(1)
    assert not delta.has_operator_degree(0)
    bad = Mat.from_stored(R, [0, 1], [["0", "T"], ["x*T", "0"]])
    assert not bad.has_operator_degree(1)


def test_supertrace_weights_even_component():
    R = _ring2()
    # diag(a, b) on degrees (0, 1): classical signs on the 0-form part
    m = Mat(
        R,
        [0, 1],
        [0, 1],
        [
            [USeries.from_ring(R.from_string("x")), USeries.zero(R)],
            [USeries.zero(R), USeries.from_ring(R.from_string("y"))],
        ],
    )
    assert m.supertrace() == USeries.from_ring(R.from_string("x-y"))


def test_supertrace_odd_component_is_plain_trace():
    R = _ring2()
    dx = DiffForm.d_var(R, "x")
    dy = DiffForm.d_var(R, "y")
    m = Mat(
        R,
        [0, 1],
        [0, 1],
        [
            [USeries.from_form(dx), USeries.zero(R)],
            [USeries.zero(R), USeries.from_form(dy)],
        ],
    )
    # odd form degree: plain trace, no parity weights
    assert m.supertrace() == USeries.from_form(dx + dy)


def test_supertrace_vanishes_on_even_odd_commutator():
    # str([X, Y]) = 0 with the graded commutator; the form degree counts
    # toward parity, so [[0,dx],[0,0]] on degrees (0,1) is EVEN and the
    # bracket is a difference
    R = _ring2()
    z = USeries.zero(R)
    X = Mat(R, [0, 1], [0, 1], [[z, USeries.from_form(DiffForm.d_var(R, "x"))], [z, z]])
    Y = Mat(R, [0, 1], [0, 1], [[z, z], [USeries.from_ring(R.from_string("y")), z]])
    comm = X @ Y - Y @ X
    assert comm.supertrace().is_zero()


def test_supertrace_vanishes_on_odd_odd_anticommutator():
    # two odd ring-entry operators: bracket is the anticommutator, and the
    # cancellation happens through the parity weights, not term by term
    R = _ring2()
    X = Mat.from_stored(R, [0, 1], [["0", "x"], ["y", "0"]])
    Y = Mat.from_stored(R, [0, 1], [["0", "y^2"], ["x^2", "0"]])
    comm = X @ Y + Y @ X
    assert not (X @ Y).supertrace().is_zero()  # the pieces do not vanish alone
    assert comm.supertrace().is_zero()


def test_supertrace_even_commutator_also_vanishes():
    R = _ring2()
    z = USeries.zero(R)
    A = Mat(R, [0, 1], [0, 1], [[USeries.from_ring(R.from_string("x")), z], [z, USeries.from_ring(R.from_string("x*y"))]])
    X = Mat(R, [0, 1], [0, 1], [[z, USeries.from_form(DiffForm.d_var(R, "x"))], [z, z]])
    comm = A @ X - X @ A  # even-odd commutator
    assert comm.supertrace().is_zero()


def test_supertrace_of_odd_ring_matrix_is_zero():
    # with ring entries and the degree rule enforced, odd operators have
    # zero diagonal, hence zero supertrace
    R = qi_ring("x", "T", degrees=[0, 2], grading="Z")
    delta = Mat.from_stored(R, [0, 1], [["0", "x"], ["x*T", "0"]])
    assert delta.has_operator_degree(1)
    assert delta.supertrace().is_zero()


def test_row_sign_d_and_trace_compatibility():
    # str(D(X)) = d(str(X)) for a free module: diag(a,b) on degrees (0,1)
    R = _ring2()
    m = Mat(
        R,
        [0, 1],
        [0, 1],
        [
            [USeries.from_ring(R.from_string("x^2")), USeries.zero(R)],
            [USeries.zero(R), USeries.from_ring(R.from_string("x*y"))],
        ],
    )
    lhs = m.row_sign_d().supertrace()
    str_m = m.supertrace()
    rhs = USeries(R, {J: de_rham_d(f) for J, f in str_m.coeffs.items()})
    assert lhs == rhs


def test_row_sign_d_product_rule():
    # D(XY) = D(X)Y + (-1)^{m_X} X D(Y) for ring-entry matrices
    R = _ring2()
    X = Mat.from_stored(R, [0, 1], [["0", "x^2"], ["y", "0"]])  # odd
    Y = Mat.from_stored(R, [0, 1], [["x*y", "0"], ["0", "y^2"]])  # even
    lhs = (X @ Y).row_sign_d()
    rhs = X.row_sign_d() @ Y - X @ Y.row_sign_d()  # (-1)^{m_X} = -1
    assert lhs == rhs
    lhs2 = (Y @ X).row_sign_d()
    rhs2 = Y.row_sign_d() @ X + Y @ X.row_sign_d()
    assert lhs2 == rhs2


def test_apply_matches_columns():
    R = _ring2()
    X = Mat.from_stored(R, [0, 1], [["x", "y"], ["1", "0"]])
    Y = Mat.from_stored(R, [0, 1], [["y", "x^2"], ["0", "x"]])
    prod = X @ Y
    for j in range(2):
        assert prod.column(j) == X.apply(Y.column(j))


def test_jd_column_signs():
    R = _ring2()
    col = [USeries.from_ring(R.from_string("x^2")), USeries.from_ring(R.from_string("x*y"))]
    out = jd_column((0, 1), col)
    assert out[0] == USeries.from_form(de_rham_d(DiffForm.from_ring(R.from_string("x^2"))))
    assert out[1] == USeries.from_form(de_rham_d(DiffForm.from_ring(R.from_string("x*y")))).scale(Scalar(-1))


def test_shape_mismatch_raises():
    R = _ring2()
    a = Mat.identity(R, [0, 1])
    b = Mat.identity(R, [0, 0, 1])
    with pytest.raises(InvalidInput):
        a @ b
    with pytest.raises(InvalidInput):
        a + b


entries = st.sampled_from(["0", "x", "y", "x*y", "x^2-1", "2*y"])


@settings(deadline=None, max_examples=25)
@given(entries, entries, entries, entries)
def test_supertrace_linear(a, b, c, d):
    R = _ring2()
    X = Mat.from_stored(R, [0, 1], [[a, b], [c, d]])
    Y = Mat.from_stored(R, [0, 1], [[d, c], [b, a]])
    assert (X + Y).supertrace() == X.supertrace() + Y.supertrace()
    assert X.scale(Scalar(3)).supertrace() == X.supertrace().scale(Scalar(3))
