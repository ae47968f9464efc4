"""Curved algebras, perfect modules, connections, and Chern-Weil traces.

A curved algebra is (A, h) with h of Gamma-degree 2; a curved module is a
projective module presented by an idempotent e on a graded free module,
together with an odd endomorphism delta with delta^2 = -h·e.  Connections
are e∘(row-signed d) plus an optional matrix perturbation; their curvature
is computed by honest double application to the columns of e (with a
linearity residue check), and the Chern character is the supertrace of
exp(-R) for R = u·curvature + [nabla, delta].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .errors import Inhomogeneous, InvalidInput, NonLinearCurvature
from .forms import (
    DiffForm,
    USeries,
    de_rham_d,
    hn_differential,
    vanishes_mod_relation,
)
from .matform import Column, Mat, form_degree_parity, jd_column, supertrace_of_product
from .rings import GradedRing, RingElement
from .scalars import Scalar

# spec vocabulary: an endomorphism-valued form is just a Mat
EndoForm = Mat


@dataclass
class CurvedAlgebra:
    """(A, h): an evenly graded ring with a degree-2 curvature element."""

    ring: GradedRing
    h: RingElement

    def __post_init__(self):
        if not self.h.has_gamma_degree(self.ring.degree_reduce(2)):
            raise Inhomogeneous("curvature h must be homogeneous of Gamma-degree 2")


class CurvedModule:
    """(P, delta): image of an idempotent with an odd twisting endomorphism.

    All matrices are held internally (column convention); use from_stored
    for data in the written convention.
    """

    def __init__(self, algebra: CurvedAlgebra, degrees, delta: Mat,
                 e: Mat | None = None, mu: Mat | None = None):
        self.algebra = algebra
        self.degrees = tuple(int(d) for d in degrees)
        self.e = Mat.identity(algebra.ring, self.degrees) if e is None else e
        self.delta = delta
        self.mu = mu

    @staticmethod
    def from_stored(algebra: CurvedAlgebra, degrees, delta_rows,
                    idempotent_rows=None, mu_rows=None) -> "CurvedModule":
        ring = algebra.ring
        delta = Mat.from_stored(ring, degrees, delta_rows)
        e = None
        if idempotent_rows is not None:
            e = Mat.from_stored(ring, degrees, idempotent_rows)
        mu = None
        if mu_rows is not None:
            mu = Mat.from_stored(ring, degrees, mu_rows)
        return CurvedModule(algebra, degrees, delta, e=e, mu=mu)

    @property
    def ring(self) -> GradedRing:
        return self.algebra.ring

    def rank_matrix(self) -> Mat:
        return self.e


@dataclass
class ModuleVerdict:
    """Outcome of check_module: which invariants hold, with messages."""

    ok: bool
    failures: list[str] = field(default_factory=list)
    realized_square: Mat | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_module(M: CurvedModule, Alg: CurvedAlgebra | None = None) -> ModuleVerdict:
    """Validate a curved module: degree rules, idempotency, support, and
    the curvature relation delta^2 = -h·e."""
    alg = Alg if Alg is not None else M.algebra
    failures: list[str] = []
    e, delta = M.e, M.delta
    if not e.has_operator_degree(0):
        failures.append("idempotent entries violate the degree rule |e_ij| = |e_i|-|e_j|")
    if not delta.has_operator_degree(1):
        failures.append("delta entries violate the degree rule |d_ij| = |e_i|-|e_j|+1")
    if not (e @ e - e).is_zero():
        failures.append("e^2 != e")
    if not (e @ delta @ e - delta).is_zero():
        failures.append("delta is not supported on the image of e")
    if M.mu is not None:
        if not (e @ M.mu @ e - M.mu).is_zero():
            failures.append("mu is not supported on the image of e")
        if not M.mu.has_operator_degree(-1):
            failures.append("mu entries violate the connection degree rule")
    square = delta @ delta
    target = e.scale_ring(-alg.h)
    if not (square - target).is_zero():
        failures.append("delta^2 != -h·e (realized curvature differs)")
    return ModuleVerdict(not failures, failures, realized_square=square)


@dataclass
class Connection:
    """nabla = e ∘ (row-signed d) + theta, theta an e-supported matrix of
    one-forms (theta = 0 is the Levi-Civita connection of the presentation)."""

    module: CurvedModule
    theta: Mat
    # cached nabla^2 and [nabla, delta] (shared by chern_weil /
    # commutator_check / cycle_check on the same connection)
    _curvature: Mat | None = field(default=None, repr=False, compare=False)
    _curvature_checked: bool = field(default=False, repr=False, compare=False)
    _dprime: Mat | None = field(default=None, repr=False, compare=False)

    def apply(self, col: Column) -> Column:
        out = self.module.e.apply(jd_column(self.module.degrees, col))
        if not self.theta.is_zero():
            extra = self.theta.apply(col)
            out = [a + b for a, b in zip(out, extra)]
        return out


def levi_civita(M: CurvedModule) -> Connection:
    """The connection induced by the idempotent presentation (theta = 0)."""
    base = Mat.zero(M.ring, M.degrees, M.degrees)
    if M.mu is not None:
        base = M.mu
    return Connection(M, base)


def connection_with_mu(M: CurvedModule, mu: Mat) -> Connection:
    """Levi-Civita plus an explicit perturbation matrix of one-forms."""
    e = M.e
    if not (e @ mu @ e - mu).is_zero():
        raise InvalidInput("connection perturbation must be supported on im(e)")
    if not mu.has_operator_degree(-1):
        raise InvalidInput("connection perturbation must have operator degree -1")
    base = levi_civita(M).theta
    return Connection(M, base + mu)


def _infer_parity(X: Mat) -> int:
    for m in (0, 1):
        if X.has_operator_degree(m) or X.has_operator_degree(m - 2):
            return m
    raise Inhomogeneous("matrix has no well-defined operator parity")


def covariant_derivative_pair(Ci: Connection, Cj: Connection, X: Mat,
                              degree: int | None = None) -> Mat:
    """[nabla, X] for X: module(Cj) -> module(Ci):
    e_i·D(X)·e_j + theta_i·X - (-1)^{|X|} X·theta_j."""
    m = _infer_parity(X) if degree is None else degree
    ei, ej = Ci.module.e, Cj.module.e
    out = ei @ X.row_sign_d() @ ej
    if not Ci.theta.is_zero():
        out = out + Ci.theta @ X
    if not Cj.theta.is_zero():
        tx = X @ Cj.theta
        out = out - tx if m % 2 == 0 else out + tx
    return out


def covariant_derivative(C: Connection, X: Mat, degree: int | None = None) -> Mat:
    """[nabla, X] for an endomorphism-valued form X of the module of C."""
    return covariant_derivative_pair(C, C, X, degree)


def curvature_mat(C: Connection, *, check_linearity: bool = True) -> Mat:
    """nabla^2 as a matrix, by double application to the columns of e.

    The result is automatically supported on im(e).  With check_linearity
    the per-variable residue nabla^2(col·x_v) - nabla^2(col)·x_v is
    verified to vanish (an implementation bug detector; A-linearity is
    automatic mathematically), raising NonLinearCurvature otherwise.  Over
    a quotient ring d of a normal form is not a derivation, so the residue
    is only required to lie in the relation submodule.
    """
    if C._curvature is not None and (C._curvature_checked or not check_linearity):
        return C._curvature
    M = C.module
    ring = M.ring
    cols = []
    for j in range(len(M.degrees)):
        base = M.e.column(j)
        cols.append(C.apply(C.apply(base)))
        if check_linearity:
            for name in ring.variables:
                xv = USeries.from_ring(ring.var(name))
                scaled = [v * xv for v in base]
                lhs = C.apply(C.apply(scaled))
                rhs = [v * xv for v in cols[-1]]
                for a, b in zip(lhs, rhs):
                    resid = a - b
                    if resid.is_zero():
                        continue
                    if ring.relation is not None and all(
                        vanishes_mod_relation(resid.coefficient(J))
                        for J in resid.u_powers()
                    ):
                        continue
                    raise NonLinearCurvature(
                        f"curvature fails linearity in {name} on column {j}"
                    )
    K = Mat.from_columns(ring, M.degrees, M.degrees, cols)
    C._curvature = K
    C._curvature_checked = C._curvature_checked or check_linearity
    return K


def curvature_R(C: Connection, *, check_linearity: bool = True) -> Mat:
    """R = u·nabla^2 + [nabla, delta], a matrix over USeries."""
    K = curvature_mat(C, check_linearity=check_linearity)
    if C._dprime is None:
        C._dprime = covariant_derivative(C, C.module.delta, 1)
    return K.shift_u(1) + C._dprime


def supertrace(X: Mat) -> USeries:
    """Named entry point for the per-component supertrace."""
    return X.supertrace()


def chern_weil(M: CurvedModule, C: Connection) -> USeries:
    """str(exp(-R)) = sum_m (-1)^m str(R^m)/m!.

    The m = 0 term is the supertrace of the identity of P, i.e. str(e).
    With R = A + u·B for A = [nabla, delta] (one-forms) and B = nabla^2
    (two-forms), str(R^m) expands over binary words in A, B.  Words of
    form degree m + #B > nvars vanish, both letters have even total
    degree so the supertrace is invariant under rotating a word, and
    rotation classes share prefix products; this evaluates far fewer and
    far smaller products than powering the mixed matrix R.
    """
    ring = M.ring
    K = curvature_mat(C)
    if C._dprime is None:
        C._dprime = covariant_derivative(C, C.module.delta, 1)
    A = C._dprime
    acc = M.e.supertrace()
    top = ring.nvars
    a_zero = A.is_zero()
    b_zero = K.is_zero()
    # parity mismatch per letter: form parity + operator-degree parity
    # (A = [nabla, delta] has operator degree 0, B = nabla^2 likewise);
    # a word of odd total mismatch has a structurally zero supertrace
    pa = form_degree_parity(A)
    pb = form_degree_parity(K)

    prefixes: dict[tuple, Mat] = {}

    def word_mat(word: tuple) -> Mat:
        if len(word) == 1:
            return K if word[0] else A
        got = prefixes.get(word)
        if got is None:
            got = word_mat(word[:-1]) @ (K if word[-1] else A)
            prefixes[word] = got
        return got

    def word_trace(word: tuple) -> USeries:
        if len(word) == 1:
            return word_mat(word).supertrace()
        cut = (len(word) + 1) // 2
        return supertrace_of_product(word_mat(word[:cut]), word_mat(word[cut:]))

    for m in range(1, top + 1):
        rotation_classes: dict[tuple, int] = {}
        for bits in range(1 << m):
            w = tuple((bits >> k) & 1 for k in range(m))
            nb = sum(w)
            if m + nb > top:
                continue
            if (a_zero and nb < m) or (b_zero and nb):
                continue
            if pa is not None and pb is not None and ((m - nb) * pa + nb * pb) % 2:
                continue
            canon = min(w[r:] + w[:r] for r in range(m))
            rotation_classes[canon] = rotation_classes.get(canon, 0) + 1
        for w, mult in sorted(rotation_classes.items()):
            tr = word_trace(w)
            if tr.is_zero():
                continue
            weight = Scalar(Fraction((-1) ** m * mult, factorial(m)))
            acc = acc + tr.scale(weight).shift_u(sum(w))
    return acc


@dataclass
class IdentityVerdict:
    """Result of an exact identity check, with the mode that established it.

    mode is 'exact' for literal equality, 'mod-relation' when the residue
    lies in the relation submodule (quotient rings only), or 'failed'.
    """

    ok: bool
    mode: str
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _useries_vanishes(p: USeries, bound: int | None) -> IdentityVerdict:
    if p.is_zero():
        return IdentityVerdict(True, "exact")
    ring = p.ring
    if ring.relation is None:
        return IdentityVerdict(False, "failed", f"nonzero residue {p}")
    if bound is None:
        bound = max(
            (c.total_degree() for f in p.coeffs.values() for c in f.parts.values()),
            default=0,
        ) + 2
    for J in sorted(p.coeffs):
        if not vanishes_mod_relation(p.coeffs[J], bound):
            return IdentityVerdict(
                False, "failed", f"u^{J} residue outside relation submodule (bound {bound})"
            )
    return IdentityVerdict(True, "mod-relation", f"bound {bound}")


def _mat_vanishes(X: Mat, bound: int | None) -> IdentityVerdict:
    mode = "exact"
    detail = ""
    for row in X.entries:
        for v in row:
            verdict = _useries_vanishes(v, bound)
            if not verdict:
                return verdict
            if verdict.mode == "mod-relation":
                mode = "mod-relation"
                detail = verdict.detail
    return IdentityVerdict(True, mode, detail)


def cycle_check(M: CurvedModule, C: Connection, bound: int | None = None,
                *, ch: USeries | None = None) -> IdentityVerdict:
    """(u·d + dh)(ch) = 0: the Chern character is a cycle.

    Pass a precomputed Chern character via ch to avoid recomputing it.
    """
    if ch is None:
        ch = chern_weil(M, C)
    residue = hn_differential(ch, M.algebra.h)
    return _useries_vanishes(residue, bound)


def left_dh_matrix(M: CurvedModule) -> Mat:
    """The sandwiched matrix of left multiplication by dh on im(e):
    entries (-1)^{|e_t|} dh ∧ e[t][s]."""
    ring = M.ring
    dh = de_rham_d(DiffForm.from_ring(M.algebra.h))
    dhu = USeries.from_form(dh)
    rows = []
    for t, row in enumerate(M.e.entries):
        sign = Scalar((-1) ** (M.degrees[t] % 2))
        rows.append([(dhu * v).scale(sign) for v in row])
    return Mat(ring, M.degrees, M.degrees, rows)


def commutator_check(M: CurvedModule, C: Connection, bound: int | None = None) -> IdentityVerdict:
    """[u·nabla + delta, R] = dh·e (as sandwiched matrices)."""
    R = curvature_R(C)
    lhs = covariant_derivative(C, R, 0).shift_u(1) + (M.delta @ R - R @ M.delta)
    return _mat_vanishes(lhs - left_dh_matrix(M), bound)


def chern_classes(M: CurvedModule, C: Connection) -> list[DiffForm]:
    """Chern classes of a module with delta = 0 from Newton's identities on
    the power sums p_j = str(K^j)."""
    if not M.delta.is_zero():
        raise InvalidInput("chern_classes applies to modules with delta = 0")
    ring = M.ring
    K = curvature_mat(C)
    top = ring.nvars // 2
    powers: list[DiffForm] = []
    power = None
    for j in range(1, top + 1):
        power = K if power is None else power @ K
        if power.is_zero():
            powers.append(DiffForm.zero(ring))
            power = None  # stays zero; keep list aligned
            powers.extend(DiffForm.zero(ring) for _ in range(j + 1, top + 1))
            break
        powers.append(power.supertrace().coefficient(0))
    classes = [DiffForm.from_ring(ring.one())]
    for k in range(1, len(powers) + 1):
        acc = DiffForm.zero(ring)
        for j in range(1, k + 1):
            term = classes[k - j].wedge(powers[j - 1])
            if j % 2 == 0:
                term = -term
            acc = acc + term
        classes.append(acc.scale(Scalar(Fraction(1, k))))
    return classes
