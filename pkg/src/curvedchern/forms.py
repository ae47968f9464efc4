"""Differential forms with exact polynomial coefficients, and u-series.

Forms live in the free exterior algebra over the ring's normal-form
coefficients: a DiffForm maps strictly increasing tuples of variable
indices to RingElements.  Over a quotient ring the relation df0 = 0 is
deliberately NOT imposed; callers that need equality in the honest Kaehler
differentials work modulo the submodule generated by df0 ∧ dx_S via
module_membership.

USeries are finitely supported series in the even formal variable u with
DiffForm coefficients; hn_differential is the mixed-complex differential
u·d + dh∧(-).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InternalCheckFailure, InvalidInput, NotTopForm
from .groebner import buchberger, ideal_nf, jacobian_ideal
from .linalg import solve_sparse
from .rings import GradedRing, RingElement, monomial_key
from .scalars import Scalar

Indices = tuple[int, ...]


class DiffForm:
    """A (possibly inhomogeneous) exterior form with RingElement coefficients."""

    __slots__ = ("ring", "parts")

    def __init__(self, ring: GradedRing, parts: dict | None = None):
        self.ring = ring
        clean: dict[Indices, RingElement] = {}
        for S, coeff in (parts or {}).items():
            S = tuple(S)
            if any(b <= a for a, b in zip(S, S[1:])):
                raise InvalidInput(f"wedge index tuple {S} is not strictly increasing")
            if any(v < 0 or v >= ring.nvars for v in S):
                raise InvalidInput(f"wedge index tuple {S} out of range")
            if not coeff.is_zero():
                clean[S] = coeff
        self.parts = clean

    # -- constructors --------------------------------------------------

    @staticmethod
    def zero(ring: GradedRing) -> "DiffForm":
        return DiffForm(ring, {})

    @staticmethod
    def from_ring(p: RingElement) -> "DiffForm":
        return DiffForm(p.ring, {(): p})

    @staticmethod
    def d_var(ring: GradedRing, name: str) -> "DiffForm":
        return DiffForm(ring, {(ring._index[name],): ring.one()})

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "DiffForm") -> "DiffForm":
        out = dict(self.parts)
        for S, c in other.parts.items():
            got = out.get(S)
            s = c if got is None else got + c
            if s.is_zero():
                out.pop(S, None)
            else:
                out[S] = s
        return DiffForm(self.ring, out)

    def __sub__(self, other: "DiffForm") -> "DiffForm":
        return self + (-other)

    def __neg__(self) -> "DiffForm":
        return DiffForm(self.ring, {S: -c for S, c in self.parts.items()})

    def scale_ring(self, p: RingElement) -> "DiffForm":
        return DiffForm(self.ring, {S: p * c for S, c in self.parts.items()})

    def scale(self, c: Scalar) -> "DiffForm":
        return DiffForm(self.ring, {S: coeff.scale(c) for S, coeff in self.parts.items()})

    def wedge(self, other: "DiffForm") -> "DiffForm":
        out: dict[Indices, RingElement] = {}
        for S1, c1 in self.parts.items():
            for S2, c2 in other.parts.items():
                merged = _merge_indices(S1, S2)
                if merged is None:
                    continue
                S, sign = merged
                c = c1 * c2
                if sign < 0:
                    c = -c
                got = out.get(S)
                s = c if got is None else got + c
                if s.is_zero():
                    out.pop(S, None)
                else:
                    out[S] = s
        return DiffForm(self.ring, out)

    # -- structure -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.parts

    def form_degrees(self) -> set[int]:
        return {len(S) for S in self.parts}

    def component(self, degree: int) -> "DiffForm":
        return DiffForm(
            self.ring, {S: c for S, c in self.parts.items() if len(S) == degree}
        )

    def max_degree(self) -> int:
        return max((len(S) for S in self.parts), default=0)

    def coefficient(self, S: Indices) -> RingElement:
        return self.parts.get(tuple(S), self.ring.zero())

    def has_gamma_degree(self, d: int) -> bool:
        """Check Gamma-homogeneity with |d(x_v)| = |x_v| - 1 (zero passes)."""
        ring = self.ring
        for S, c in self.parts.items():
            shift = sum(ring.degrees[v] - 1 for v in S)
            if not c.has_gamma_degree(ring.degree_reduce(d - shift)):
                return False
        return True

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DiffForm)
            and self.ring.same_as(other.ring)
            and self.parts == other.parts
        )

    def __hash__(self) -> int:
        return hash(tuple(sorted((S, tuple(sorted(c.terms.items()))) for S, c in self.parts.items())))

    # -- printing ------------------------------------------------------

    def __str__(self) -> str:
        if not self.parts:
            return "0"
        chunks = []
        for S in sorted(self.parts, key=lambda s: (len(s), s)):
            coeff = self.parts[S]
            wedge = " ".join(f"d({self.ring.variables[v]})" for v in S)
            cs = str(coeff)
            if not S:
                chunks.append(cs)
            elif cs == "1":
                chunks.append(wedge)
            elif cs == "-1":
                chunks.append(f"-{wedge}")
            else:
                if " " in cs:  # multi-term coefficient
                    cs = f"({cs})"
                chunks.append(f"{cs}*{wedge}")
        out = chunks[0]
        for ch in chunks[1:]:
            out += f" - {ch[1:]}" if ch.startswith("-") else f" + {ch}"
        return out

    def __repr__(self) -> str:
        return f"<form {self}>"


def _merge_indices(S1: Indices, S2: Indices) -> tuple[Indices, int] | None:
    """Concatenate and sort wedge indices; None if a repeat kills the term."""
    if set(S1) & set(S2):
        return None
    merged = S1 + S2
    # inversion count of the concatenation gives the Koszul sign
    inversions = sum(
        1 for a in range(len(merged)) for b in range(a + 1, len(merged)) if merged[a] > merged[b]
    )
    return tuple(sorted(merged)), (-1) ** inversions


def de_rham_d(omega: DiffForm) -> DiffForm:
    """Exterior derivative: d(a dx_S) = sum_v (da/dx_v) dx_v ∧ dx_S."""
    ring = omega.ring
    out = DiffForm.zero(ring)
    for S, c in omega.parts.items():
        for v, name in enumerate(ring.variables):
            dc = c.derivative(name)
            if dc.is_zero():
                continue
            term = DiffForm(ring, {(v,): dc}).wedge(DiffForm(ring, {S: ring.one()}))
            out = out + term
    return out


def wedge(omega: DiffForm, eta: DiffForm) -> DiffForm:
    """Named entry point for the wedge product."""
    return omega.wedge(eta)


# ---------------------------------------------------------------------------
# u-series
# ---------------------------------------------------------------------------


class USeries:
    """Finitely supported sum of DiffForms weighted by powers of u (u even)."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: GradedRing, coeffs: dict | None = None):
        self.ring = ring
        clean: dict[int, DiffForm] = {}
        for J, form in (coeffs or {}).items():
            if J < 0:
                raise InvalidInput("negative u-powers do not occur")
            if not form.is_zero():
                clean[int(J)] = form
        self.coeffs = clean

    @staticmethod
    def zero(ring: GradedRing) -> "USeries":
        return USeries(ring, {})

    @staticmethod
    def from_form(form: DiffForm, power: int = 0) -> "USeries":
        return USeries(form.ring, {power: form})

    @staticmethod
    def from_ring(p: RingElement, power: int = 0) -> "USeries":
        return USeries(p.ring, {power: DiffForm.from_ring(p)})

    def __add__(self, other: "USeries") -> "USeries":
        out = dict(self.coeffs)
        for J, f in other.coeffs.items():
            got = out.get(J)
            s = f if got is None else got + f
            if s.is_zero():
                out.pop(J, None)
            else:
                out[J] = s
        return USeries(self.ring, out)

    def __sub__(self, other: "USeries") -> "USeries":
        return self + (-other)

    def __neg__(self) -> "USeries":
        return USeries(self.ring, {J: -f for J, f in self.coeffs.items()})

    def __mul__(self, other: "USeries") -> "USeries":
        out: dict[int, DiffForm] = {}
        for J1, f1 in self.coeffs.items():
            for J2, f2 in other.coeffs.items():
                w = f1.wedge(f2)
                if w.is_zero():
                    continue
                got = out.get(J1 + J2)
                s = w if got is None else got + w
                out[J1 + J2] = s
        return USeries(self.ring, out)

    def scale(self, c: Scalar) -> "USeries":
        return USeries(self.ring, {J: f.scale(c) for J, f in self.coeffs.items()})

    def shift_u(self, k: int) -> "USeries":
        return USeries(self.ring, {J + k: f for J, f in self.coeffs.items()})

    def coefficient(self, J: int) -> DiffForm:
        return self.coeffs.get(J, DiffForm.zero(self.ring))

    def u_powers(self) -> tuple[int, ...]:
        return tuple(sorted(self.coeffs))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, USeries)
            and self.ring.same_as(other.ring)
            and self.coeffs == other.coeffs
        )

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        return "; ".join(f"u^{J}: {self.coeffs[J]}" for J in sorted(self.coeffs))

    def __repr__(self) -> str:
        return f"<useries {self}>"


def useries_arith(p: USeries, q: USeries, op: str) -> USeries:
    """Named dispatch: add or mul."""
    if op == "add":
        return p + q
    if op == "mul":
        return p * q
    raise InvalidInput(f"unknown useries op {op!r}")


def hn_differential(p: USeries, h: RingElement) -> USeries:
    """(u·d + dh∧)(p): the negative-cyclic-side mixed differential."""
    ring = p.ring
    dh = de_rham_d(DiffForm.from_ring(h))
    out: dict[int, DiffForm] = {}
    top = max(p.coeffs, default=-1)
    for J in range(0, top + 2):
        val = DiffForm.zero(ring)
        if J - 1 in p.coeffs:
            val = val + de_rham_d(p.coeffs[J - 1])
        if J in p.coeffs:
            val = val + dh.wedge(p.coeffs[J])
        if not val.is_zero():
            out[J] = val
    return USeries(ring, out)


def tau_involution(p: USeries) -> USeries:
    """u -> -u; an involution on u-series, exposed as a utility."""
    return USeries(
        p.ring,
        {J: (f if J % 2 == 0 else f.scale(Scalar(-1))) for J, f in p.coeffs.items()},
    )


# ---------------------------------------------------------------------------
# membership certificates
# ---------------------------------------------------------------------------


@dataclass
class MembershipCertificate:
    """Outcome of a degree-bounded module-membership solve.

    member=False only ever means `not member up to degree_bound`; the
    coefficients of a positive certificate are re-verified by expansion.
    """

    member: bool
    degree_bound: int
    coefficients: list[RingElement] | None = None

    def __bool__(self) -> bool:
        return self.member


def _nf_monomials_up_to(ring: GradedRing, bound: int) -> list:
    """Normal-form ring monomials of total degree <= bound, sorted."""
    out = []
    stack = [(0,) * ring.nvars]
    seen = set(stack)
    while stack:
        m = stack.pop()
        out.append(m)
        for v in range(ring.nvars):
            if sum(m) < bound:
                nxt = m[:v] + (m[v] + 1,) + m[v + 1 :]
                if nxt not in seen:
                    # skip monomials the relation would rewrite
                    if ring.relation is not None:
                        lm = ring._rel_lm
                        if all(a >= b for a, b in zip(nxt, lm)):
                            continue
                    seen.add(nxt)
                    stack.append(nxt)
    return sorted(out, key=monomial_key)


def module_membership(
    target: DiffForm, generators: list[DiffForm], degree_bound: int
) -> MembershipCertificate:
    """Decide target = sum q_g * g with ring coefficients of degree <= bound.

    Exact sparse solve over the monomial basis; positive certificates are
    re-verified by expansion (InternalCheckFailure if that ever fails).
    """
    ring = target.ring
    if target.is_zero():
        return MembershipCertificate(True, degree_bound, [ring.zero()] * len(generators))
    monomials = _nf_monomials_up_to(ring, degree_bound)
    columns = []
    col_meta = []
    for gi, g in enumerate(generators):
        for m in monomials:
            p = ring.element({m: Scalar(1)})
            shifted = g.scale_ring(p)
            col = {}
            for S, c in shifted.parts.items():
                for mono, val in c.terms.items():
                    col[(S, mono)] = val
            if col:
                columns.append(col)
                col_meta.append((gi, m))
    rhs = {}
    for S, c in target.parts.items():
        for mono, val in c.terms.items():
            rhs[(S, mono)] = val
    solution = solve_sparse(columns, rhs)
    if solution is None:
        return MembershipCertificate(False, degree_bound)
    coeffs = [ring.zero() for _ in generators]
    for (gi, m), x in zip(col_meta, solution):
        if not x.is_zero():
            coeffs[gi] = coeffs[gi] + ring.element({m: x})
    # re-verify by expansion
    check = DiffForm.zero(ring)
    for q, g in zip(coeffs, generators):
        check = check + g.scale_ring(q)
    if check != target:
        raise InternalCheckFailure("membership certificate failed re-verification")
    return MembershipCertificate(True, degree_bound, coeffs)


def relation_form_generators(ring: GradedRing, degrees: set[int]) -> list[DiffForm]:
    """Generators df0 ∧ dx_S of the relation submodule in the given form
    degrees (f0·Ω generators are redundant because coefficients are always
    normal-formed)."""
    if ring.relation is None:
        return []
    df0 = de_rham_d(DiffForm.from_ring(ring.relation))
    gens = []
    for c in sorted(degrees):
        if c == 0:
            continue
        for S in _index_tuples(ring.nvars, c - 1):
            g = df0.wedge(DiffForm(ring, {S: ring.one()}))
            if not g.is_zero():
                gens.append(g)
    return gens


def _index_tuples(n: int, k: int) -> list[Indices]:
    from itertools import combinations

    return [tuple(c) for c in combinations(range(n), k)]


def _relation_gradient_unit(ring: GradedRing) -> DiffForm | None:
    """df0 when the gradient self-pairing of the relation is a unit scalar.

    Let c_i = NF(∂f0/∂x_i) and p = Σ c_i·c_i.  Contracting with the
    gradient field ξ = Σ c_i ∂_i is an odd derivation ι with ι(df0) = p,
    so p·ω = ι(df0 ∧ ω) + df0 ∧ ι(ω).  When p is an invertible scalar of
    the quotient ring this makes ω ↦ df0 ∧ ω a *complete* membership test
    for the relation submodule: df0 ∧ ω = 0 iff ω = df0 ∧ (p⁻¹ ι(ω)).
    Returns None when the shortcut does not apply.
    """
    cached = getattr(ring, "_gradient_unit_df0", False)
    if cached is not False:
        return cached
    result = None
    if ring.relation is not None:
        df0 = de_rham_d(DiffForm.from_ring(ring.relation))
        p = ring.zero()
        for v in ring.variables:
            c = ring.relation.derivative(v)
            p = p + c * c
        terms = p.terms
        if len(terms) == 1 and set(terms) == {(0,) * ring.nvars}:
            result = df0
    ring._gradient_unit_df0 = result
    return result


def vanishes_mod_relation(form: DiffForm, degree_bound: int | None = None) -> bool:
    """True when the form is 0, or lies in the relation submodule.

    For relations whose gradient self-pairing is a unit scalar (e.g.
    sphere relations) the test is exact and unbounded: wedge with df0 and
    compare with zero.  Otherwise membership is a degree-bounded linear
    solve; with no bound, coefficients are sought up to two degrees above
    the largest coefficient degree appearing in the form itself.
    """
    if form.is_zero():
        return True
    if form.ring.relation is None:
        return False
    df0 = _relation_gradient_unit(form.ring)
    if df0 is not None:
        return df0.wedge(form).is_zero()
    if degree_bound is None:
        degree_bound = max(c.total_degree() for c in form.parts.values()) + 2
    gens = relation_form_generators(form.ring, form.form_degrees())
    if not gens:
        return False
    return bool(module_membership(form, gens, degree_bound))


def milnor_representative(omega: DiffForm, f: RingElement) -> RingElement:
    """Class of a top form in the Milnor algebra of f.

    For omega = a·dx_1∧...∧dx_n returns the Groebner normal form of a
    modulo the Jacobian ideal of f; raises NotTopForm when omega has a
    component below top degree.
    """
    ring = omega.ring
    top = tuple(range(ring.nvars))
    for S in omega.parts:
        if S != top:
            raise NotTopForm(f"component dx_{S} is not the top form")
    coeff = omega.coefficient(top)
    if coeff.is_zero():
        return ring.zero()
    G = buchberger(jacobian_ideal(f))
    return ideal_nf(coeff, G)
