from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvedchern.errors import IncomposableChain, InvalidInput
from curvedchern.forms import DiffForm, USeries, de_rham_d, wedge
from curvedchern.hochschild import (
    CategoryData,
    ChainSum,
    b0,
    b1,
    b2,
    chain,
    chern_via_chains,
    connes_B,
    expand_multilinear,
    hkr,
    pushforward,
    reduce_chain,
    tr_nabla,
    truncate_length,
)
from curvedchern.matform import Mat
from curvedchern.modules import (
    Connection,
    CurvedAlgebra,
    CurvedModule,
    chern_weil,
    levi_civita,
)
from curvedchern.randomgen import random_chain_setup, random_poly, random_ring_chain
from curvedchern.scalars import Scalar

from util import qi_ring, sphere_ring


# -- fixtures ----------------------------------------------------------


def _ring_cat(*variables, h="0"):
    """One-object category on the rank-1 free module: ring-entry chains."""
    R = qi_ring(*variables)
    alg = CurvedAlgebra(R, R.from_string(h))
    M = CurvedModule(alg, (0,), Mat.zero(R, (0,), (0,)))
    return R, CategoryData(alg, [M]), [levi_civita(M)]


def _endo_cat(degrees=(0, 1), h="0"):
    """One-object category on a free module over Q(i)[x, y]."""
    R = qi_ring("x", "y")
    alg = CurvedAlgebra(R, R.from_string(h))
    M = CurvedModule(alg, degrees, Mat.zero(R, degrees, degrees))
    return R, CategoryData(alg, [M]), [levi_civita(M)]


def _odd_pair(R):
    """Odd endomorphisms S: e0 -> x e1 and T: e1 -> y e0 on degrees (0, 1)."""
    S = Mat.from_stored(R, (0, 1), [["0", "x"], ["0", "0"]])
    T = Mat.from_stored(R, (0, 1), [["0", "0"], ["y", "0"]])
    return S, T


def _odd_betas(cat, seed):
    """Seeded e-supported odd endomorphisms, one per category object."""
    rng = random.Random(f"beta:{seed}")
    out = []
    for M in cat.objects:
        raw = Mat(
            cat.ring,
            M.degrees,
            M.degrees,
            [
                [random_poly(rng, cat.ring, max_terms=1, allow_zero=True) for _ in M.degrees]
                for _ in M.degrees
            ],
        )
        odd = (M.e @ raw @ M.e).parity_components().get(1)
        out.append(odd if odd is not None else Mat.zero(cat.ring, M.degrees, M.degrees))
    return out


def _u_d(series: USeries) -> USeries:
    """u·(d applied coefficient-wise): the right-hand side of the b2 + uB
    intertwining identity."""
    return USeries(series.ring, {J + 1: de_rham_d(f) for J, f in series.coeffs.items()})


def _dh_wedge(series: USeries, h) -> USeries:
    dh = de_rham_d(DiffForm.from_ring(h))
    return USeries(series.ring, {J: wedge(dh, f) for J, f in series.coeffs.items()})


# -- chain construction ------------------------------------------------


def test_chain_default_single_object_cycle():
    _, cat, _ = _ring_cat("x", "y")
    c = chain(cat, "x", ["y", "x*y"])
    terms = c.terms()
    assert len(terms) == 1
    coeff, ch = terms[0]
    assert coeff == Scalar(1)
    assert ch.n == 2
    assert ch.objects == (0, 0, 0)
    assert ch.degrees == (0, 0, 0)


def test_chain_splits_inhomogeneous_slots():
    R, cat, _ = _endo_cat((0, 1))
    raw = Mat.from_stored(R, (0, 1), [["x", "y"], ["1", "2"]])
    c = chain(cat, Mat.identity(R, (0, 1)), [raw])
    terms = c.terms()
    assert len(terms) == 2
    assert sorted(ch.degrees[1] for _, ch in terms) == [0, 1]
    # the components recombine to the original slot
    total = terms[0][1].slots[1] + terms[1][1].slots[1]
    assert (total - raw).is_zero()


def test_chain_rejects_mismatched_cycle():
    R, cat, _ = _ring_cat("x")
    with pytest.raises(IncomposableChain):
        chain(cat, "x", ["x"], objects=(0,))
    # a 1x1 head cannot be a hom between rank-2 objects
    R2, cat2, _ = _endo_cat((0, 1))
    with pytest.raises(IncomposableChain):
        chain(cat2, Mat.from_stored(R2, (0,), [["x"]]), [])


def test_chain_requires_slots_supported_on_presentation():
    R = qi_ring("x", "y")
    alg = CurvedAlgebra(R, R.zero())
    e = Mat.from_stored(R, (0, 0), [["1", "0"], ["0", "0"]])
    M = CurvedModule(alg, (0, 0), Mat.zero(R, (0, 0), (0, 0)), e=e)
    cat = CategoryData(alg, [M])
    bad = Mat.from_stored(R, (0, 0), [["0", "0"], ["0", "x"]])
    with pytest.raises(InvalidInput):
        chain(cat, bad, [])


def test_category_rejects_nontrivial_differential():
    R = qi_ring("x", "y")
    alg = CurvedAlgebra(R, R.from_string("-x*y"))
    M = CurvedModule.from_stored(alg, [0, 1], [["0", "x"], ["y", "0"]])
    with pytest.raises(InvalidInput):
        CategoryData(alg, [M])


# -- boundary maps -----------------------------------------------------


def test_b2_even_endomorphism_pin():
    # a0[a1] -> a0·a1[] - a1·a0[] when both slots are even
    R, cat, _ = _endo_cat((0, 0))
    A = Mat.from_stored(R, (0, 0), [["x", "0"], ["0", "0"]])
    B = Mat.from_stored(R, (0, 0), [["0", "y"], ["1", "0"]])
    assert not (A @ B - B @ A).is_zero()
    assert b2(chain(cat, A, [B])) == chain(cat, A @ B) - chain(cat, B @ A)


def test_b2_on_head_only_is_zero():
    _, cat, _ = _ring_cat("x")
    assert b2(chain(cat, "x")).is_zero()


def test_b2_odd_slot_signs():
    # e[S|T] with |S| = |T| = 1: merges at j = 0, 1 carry
    # (-1)^{|a_0|} = +1 and (-1)^{|a_0|+|a_1|-1} = +1, the cyclic term
    # (-1)^{(|a_2|-1)(|a_0|+|a_1|-1)} enters with the extra minus
    R, cat, _ = _endo_cat((0, 1))
    S, T = _odd_pair(R)
    e = Mat.identity(R, (0, 1))
    got = b2(chain(cat, e, [S, T]))
    expected = chain(cat, S, [T]) + chain(cat, e, [S @ T]) - chain(cat, T, [S])
    assert got == expected


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=400))
def test_b2_squares_to_zero(seed):
    _, _, c = random_chain_setup(seed)
    assert b2(b2(c)).is_zero()


def test_b1_vanishes_for_zero_differentials():
    cat, _, c = random_chain_setup(3)
    zeros = [
        Mat.zero(cat.ring, M.degrees, M.degrees) for M in cat.objects
    ]
    assert b1(c, zeros).is_zero()


def test_b1_head_commutator_pin():
    # with an explicit odd differential, b1(a0[]) = [delta, a0][]
    R, cat, _ = _endo_cat((0, 1))
    delta = Mat.from_stored(R, (0, 1), [["0", "x"], ["y", "0"]])
    A = Mat.from_stored(R, (0, 1), [["x", "0"], ["0", "y"]])
    got = b1(chain(cat, A), [delta])
    assert got == chain(cat, delta @ A - A @ delta)


def test_b1_requires_one_differential_per_object():
    R, cat, _ = _endo_cat((0, 1))
    with pytest.raises(InvalidInput):
        b1(chain(cat, Mat.identity(R, (0, 1))), [])


def test_b0_head_only_pin():
    # even head: a0[] -> +a0[h·e]
    _, cat, _ = _ring_cat("x", "y", h="x*y-2")
    assert b0(chain(cat, "x")) == chain(cat, "x", ["x*y-2"])


def test_b0_zero_curvature_is_zero():
    _, cat, _ = _ring_cat("x", "y")
    assert b0(chain(cat, "x", ["y"])).is_zero()


def test_b0_odd_head_signs():
    # S[T] with odd S, T: both insertion spots contribute with a minus
    R, cat, _ = _endo_cat((0, 1), h="x")
    S, T = _odd_pair(R)
    he = cat.curvature_endo(0)
    got = b0(chain(cat, S, [T]))
    assert got == -(chain(cat, S, [he, T]) + chain(cat, S, [T, he]))


# -- reduction and Connes' boundary ------------------------------------


def test_reduce_drops_scalar_identity_tails():
    _, cat, _ = _ring_cat("x")
    assert reduce_chain(chain(cat, "x", ["5"])).is_zero()
    kept = chain(cat, "x", ["x"])  # x·1 is not a Scalar multiple of 1
    assert reduce_chain(kept) == kept
    head = chain(cat, "5", ["x"])  # heads are never reduced away
    assert reduce_chain(head) == head


def test_reduce_matrix_identity_multiple():
    R, cat, _ = _endo_cat((0, 1))
    S, _ = _odd_pair(R)
    e2 = Mat.identity(R, (0, 1)).scale(Scalar(2))
    mixed = chain(cat, S, [e2]) + chain(cat, S, [S])
    assert reduce_chain(mixed) == chain(cat, S, [S])


def test_connes_B_head_only_pin():
    _, cat, _ = _ring_cat("x")
    assert connes_B(chain(cat, "x")) == chain(cat, "1", ["x"])
    # B of the identity head dies in the reduced complex
    assert connes_B(chain(cat, "1")).is_zero()


def test_connes_B_even_pair_sign():
    # a0[a1] with even entries: 1[a0|a1] - 1[a1|a0]
    _, cat, _ = _ring_cat("x", "y")
    got = connes_B(chain(cat, "x", ["y"]))
    assert got == chain(cat, "1", ["x", "y"]) - chain(cat, "1", ["y", "x"])


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=400))
def test_connes_B_squares_to_zero(seed):
    _, _, c = random_chain_setup(seed)
    assert connes_B(connes_B(c)).is_zero()


@pytest.mark.parametrize("seed", range(6))
def test_b_anticommutes_with_connes_B_reduced(seed):
    _, _, c = random_chain_setup(seed)
    bc = b2(c) + b0(c)
    Bc = connes_B(c)
    anti = b2(Bc) + b0(Bc) + connes_B(bc)
    assert reduce_chain(anti).is_zero()


# -- hkr ---------------------------------------------------------------


def test_hkr_pins():
    R, cat, _ = _ring_cat("x", "y", "z")
    x = R.from_string("x")
    dy = DiffForm.d_var(R, "y")
    dz = DiffForm.d_var(R, "z")
    assert hkr(chain(cat, "x")) == DiffForm.from_ring(x)
    assert hkr(chain(cat, "x", ["y"])) == DiffForm.from_ring(x).wedge(dy)
    half = Scalar(1) * Scalar(2).inv()
    assert hkr(chain(cat, "x", ["y", "z"])) == (
        DiffForm.from_ring(x).wedge(dy).wedge(dz).scale(half)
    )


def test_hkr_rejects_u_and_matrix_content():
    R, cat, _ = _ring_cat("x")
    with pytest.raises(InvalidInput):
        hkr(chain(cat, "x", u_exp=1))
    _, mcat, _ = _endo_cat((0, 0))
    with pytest.raises(InvalidInput):
        hkr(chain(mcat, Mat.identity(R, (0, 0))))


@pytest.mark.parametrize("seed", range(10))
def test_hkr_intertwines_boundaries(seed):
    cat, _, c = random_ring_chain(seed, with_h=True)
    assert hkr(b2(c)).is_zero()
    got = hkr(b0(c))
    dh = de_rham_d(DiffForm.from_ring(cat.algebra.h))
    assert got == wedge(dh, hkr(c))
    assert hkr(connes_B(c)) == de_rham_d(hkr(c))


# -- pushforward -------------------------------------------------------


@pytest.mark.parametrize("seed", range(4))
def test_pushforward_identity_morphism_is_identity(seed):
    _, _, c = random_chain_setup(seed)
    assert pushforward(None, None, c, 10) == c


def test_pushforward_beta_expansion_pin():
    # (id, delta) applied to 1[] is the alternating sum of delta-strings
    R = qi_ring("x", "y")
    alg = CurvedAlgebra(R, R.zero())
    M = CurvedModule(alg, (0, 1), Mat.zero(R, (0, 1), (0, 1)))
    cat = CategoryData(alg, [M])
    delta = Mat.from_stored(R, (0, 1), [["0", "x"], ["y", "0"]])
    got = pushforward(None, delta, chain(cat, M.e), 3)
    expected = ChainSum.zero(cat)
    for j in range(4):
        expected = expected + chain(cat, M.e, [delta] * j).scale(Scalar((-1) ** j))
    assert got == expected
    assert max(ch.n for _, ch in got.terms()) == 3


def test_pushforward_rho_transforms_slots():
    # rho acting alone (beta = None) maps slot-wise; scaling both slots
    # by 2 is the same chain scaled by 4 once scalars are folded in
    R, cat, _ = _endo_cat((0, 1))
    S, T = _odd_pair(R)
    c = chain(cat, S, [T])
    got = pushforward(lambda X: X.scale(Scalar(2)), None, c, 5)
    assert expand_multilinear(got) == expand_multilinear(c.scale(Scalar(4)))


@pytest.mark.parametrize("seed", range(5))
def test_pushforward_composition_law(seed):
    # inserting beta1 then beta2 agrees with inserting beta1 + beta2,
    # compared through the multilinear expansion on a common truncation
    cat, _, c = random_chain_setup(seed)
    b1s = _odd_betas(cat, 2 * seed)
    b2s = _odd_betas(cat, 2 * seed + 1)
    sums = [a + b for a, b in zip(b1s, b2s)]
    n_max = cat.ring.nvars + 1
    comp = truncate_length(
        pushforward(None, b2s, pushforward(None, b1s, c, n_max), n_max), n_max
    )
    single = pushforward(None, sums, c, n_max)
    assert expand_multilinear(comp) == expand_multilinear(single)


@pytest.mark.parametrize("seed", range(5))
def test_pushforward_commutes_with_connes_B(seed):
    cat, _, c = random_chain_setup(seed)
    betas = _odd_betas(cat, seed)
    n_max = cat.ring.nvars + 1
    lhs = truncate_length(
        reduce_chain(pushforward(None, betas, connes_B(c), n_max)), n_max - 1
    )
    rhs = truncate_length(connes_B(pushforward(None, betas, c, n_max)), n_max - 1)
    assert expand_multilinear(lhs) == expand_multilinear(rhs)


# -- the chain-level trace ---------------------------------------------


def test_tr_nabla_rank_pin():
    R, cat, conns = _endo_cat((0, 0))
    assert tr_nabla(chain(cat, Mat.identity(R, (0, 0))), conns) == USeries.from_ring(
        R.from_string("2")
    )
    R1, cat1, conns1 = _endo_cat((0, 1))
    assert tr_nabla(chain(cat1, Mat.identity(R1, (0, 1))), conns1).is_zero()


def test_tr_nabla_checks_connections():
    R, cat, _ = _endo_cat((0, 0))
    with pytest.raises(InvalidInput):
        tr_nabla(chain(cat, Mat.identity(R, (0, 0))), [])


def test_tr_nabla_on_head_matches_chern_weil_for_flat_idempotent():
    # 1[] traces to str(exp(-uK)), the Chern-Weil value of a flat module
    R, M = _sphere_module()
    C = levi_civita(M)
    cat = CategoryData(M.algebra, [M])
    assert tr_nabla(chain(cat, M.e), [C]) == chern_weil(M, C)


def test_tr_nabla_kills_identity_tails_on_free_objects():
    # the trace descends to the reduced complex: a Scalar-identity tail
    # slot has zero covariant derivative, so the whole term traces to 0
    R, cat, conns = _endo_cat((0, 1))
    S, _ = _odd_pair(R)
    c = chain(cat, S, [Mat.identity(R, (0, 1)).scale(Scalar(2))])
    assert reduce_chain(c).is_zero()
    assert tr_nabla(c, conns).is_zero()


@pytest.mark.parametrize("seed", range(12))
def test_tr_nabla_equals_hkr_on_flat_ring_chains(seed):
    _, conns, c = random_ring_chain(seed)
    assert tr_nabla(c, conns) == USeries.from_form(hkr(c))


@pytest.mark.parametrize("seed", range(12))
def test_tr_nabla_existence_identities(seed):
    cat, conns, c = random_chain_setup(seed)
    tr = tr_nabla(c, conns)
    lhs = tr_nabla(b2(c) + connes_B(c).shift_u(1), conns)
    assert lhs == _u_d(tr)
    assert tr_nabla(b0(c), conns) == _dh_wedge(tr, cat.algebra.h)


# -- chern_via_chains --------------------------------------------------


def _sphere_module():
    R = sphere_ring(3)
    alg = CurvedAlgebra(R, R.zero())
    e_rows = [
        ["1/2*(1-x1)", "1/2*(-x2-i*x3)"],
        ["1/2*(-x2+i*x3)", "1/2*(1+x1)"],
    ]
    zero = [["0", "0"], ["0", "0"]]
    M = CurvedModule.from_stored(alg, [0, 0], zero, idempotent_rows=e_rows)
    return R, M


def test_chern_via_chains_matches_chern_weil_on_xy():
    R = qi_ring("x", "y")
    alg = CurvedAlgebra(R, R.from_string("-x*y"))
    M = CurvedModule.from_stored(alg, [0, 1], [["0", "x"], ["y", "0"]])
    C = levi_civita(M)
    got = chern_via_chains(M, C)
    assert got == chern_weil(M, C)
    dxdy = DiffForm.d_var(R, "x").wedge(DiffForm.d_var(R, "y"))
    assert got == USeries.from_form(dxdy)


def test_chern_via_chains_matches_chern_weil_on_graded_ci():
    R = qi_ring("x", "T", degrees=[0, 2], grading="Z")
    alg = CurvedAlgebra(R, R.from_string("-x^2*T"))
    M = CurvedModule.from_stored(alg, [0, 1], [["0", "x"], ["x*T", "0"]])
    C = levi_civita(M)
    got = chern_via_chains(M, C)
    assert got == chern_weil(M, C)
    expected = DiffForm.from_ring(R.from_string("x")).wedge(
        DiffForm.d_var(R, "x")
    ).wedge(DiffForm.d_var(R, "T"))
    assert got == USeries.from_form(expected)


def test_chern_via_chains_free_flat_rank():
    R = qi_ring("x")
    alg = CurvedAlgebra(R, R.zero())
    M = CurvedModule(alg, (0, 0, 0), Mat.zero(R, (0, 0, 0), (0, 0, 0)))
    assert chern_via_chains(M, levi_civita(M)) == USeries.from_ring(R.from_string("3"))


def test_chern_via_chains_rejects_invalid_module():
    R = qi_ring("x", "y")
    alg = CurvedAlgebra(R, R.from_string("-x*y"))
    M = CurvedModule.from_stored(alg, [0, 1], [["0", "x"], ["x", "0"]])
    with pytest.raises(InvalidInput):
        chern_via_chains(M, levi_civita(M))
