"""Graded commutative polynomial rings over Q(i), with one optional relation.

A GradedRing is k[x_1..x_n] or k[x_1..x_n]/(f0) with k = Q(i), graded by
Gamma = Z or Z/2.  Variable degrees are always even, so every ring element
has even Gamma-degree; odd degrees only ever appear on module basis vectors.

Elements are sparse exponent-tuple -> Scalar dicts, kept in the division
normal form with respect to the single relation (a one-element generating
set is a Groebner basis of its principal ideal, so the remainder is
canonical).  The monomial order everywhere is graded lex: total degree
first, then lexicographic with earlier variables more significant.
"""

from __future__ import annotations

import re as _re
from fractions import Fraction
from math import gcd as _gcd
from operator import add as _add

from .errors import Inhomogeneous, InvalidInput
from .scalars import ONE, Scalar

Monomial = tuple[int, ...]

_NAME_RE = _re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_RESERVED = {"i", "u", "d"}


def monomial_key(m: Monomial) -> tuple:
    """Sort key for graded lex; larger key = larger monomial."""
    return (sum(m), m)


class GradedRing:
    """k[x_1..x_n] (optionally modulo a single degree-0 relation).

    Parameters
    ----------
    variables : sequence of str
        Distinct names; 'i', 'u', 'd' are reserved.
    degrees : sequence of int
        Even Gamma-degrees, one per variable.
    grading : str
        'Z' or 'Z2'.
    relation : str or RingElement or None
        A single relation of Gamma-degree 0, e.g. "x1^2+x2^2+x3^2-1".
    """

    def __init__(self, variables, degrees, grading="Z", relation=None):
        self.variables = tuple(variables)
        self.degrees = tuple(int(d) for d in degrees)
        if grading not in ("Z", "Z2"):
            raise InvalidInput(f"grading must be 'Z' or 'Z2', got {grading!r}")
        self.grading = grading
        if len(self.variables) != len(self.degrees):
            raise InvalidInput("one degree per variable required")
        if len(set(self.variables)) != len(self.variables):
            raise InvalidInput("duplicate variable names")
        for v in self.variables:
            if not _NAME_RE.fullmatch(v) or v in _RESERVED:
                raise InvalidInput(f"bad variable name {v!r}")
        for v, d in zip(self.variables, self.degrees):
            if d % 2 != 0:
                raise InvalidInput(
                    f"variable {v} has odd degree {d}; ring degrees must be even"
                )
        self.nvars = len(self.variables)
        self._index = {v: k for k, v in enumerate(self.variables)}

        self.relation: RingElement | None = None
        if relation is not None:
            rel = relation if isinstance(relation, RingElement) else self.from_string(relation)
            if rel.is_zero():
                raise InvalidInput("relation must be nonzero")
            if rel.gamma_degree() != self.degree_reduce(0):
                raise InvalidInput("relation must have Gamma-degree 0")
            if rel.total_degree() == 0:
                raise InvalidInput("relation must not be a unit")
            # store monic with respect to the leading coefficient so the
            # division step below is a plain subtract-multiple
            lm, lc = rel.leading_term()
            monic = {m: c / lc for m, c in rel.terms.items()}
            self.relation = RingElement(self, monic, _normalize=False)
            self._rel_lm = lm
            support = [k for k, p in enumerate(lm) if p]
            # single-variable lead monomials admit a one-comparison
            # divisibility test in the hot reduction loop
            self._lm_single = (support[0], lm[support[0]]) if len(support) == 1 else None
            self._nf_cache: dict[Monomial, dict] = {}
            self._nf_cache_ints: dict[Monomial, tuple] = {}

    # -- gamma bookkeeping --------------------------------------------

    def degree_reduce(self, d: int) -> int:
        return d % 2 if self.grading == "Z2" else d

    def deg_eq(self, a: int, b: int) -> bool:
        return (a - b) % 2 == 0 if self.grading == "Z2" else a == b

    def monomial_gamma(self, m: Monomial) -> int:
        return self.degree_reduce(sum(e * d for e, d in zip(m, self.degrees)))

    # -- element constructors -----------------------------------------

    def element(self, terms: dict) -> "RingElement":
        return RingElement(self, terms)

    def zero(self) -> "RingElement":
        return RingElement(self, {}, _normalize=False)

    def one(self) -> "RingElement":
        return self.scalar(ONE)

    def scalar(self, c: Scalar | int | Fraction) -> "RingElement":
        if not isinstance(c, Scalar):
            c = Scalar(c)
        if c.is_zero():
            return self.zero()
        return RingElement(self, {(0,) * self.nvars: c})

    def var(self, name: str) -> "RingElement":
        if name not in self._index:
            raise InvalidInput(f"unknown variable {name!r}")
        m = [0] * self.nvars
        m[self._index[name]] = 1
        return RingElement(self, {tuple(m): ONE})

    def gens(self) -> list["RingElement"]:
        return [self.var(v) for v in self.variables]

    def from_string(self, text: str) -> "RingElement":
        return _parse_polynomial(self, text)

    # -- internal: division by the relation ---------------------------

    def _normal_form(self, terms: dict) -> dict:
        """Remainder of division by the (monic) relation.

        Division is linear in the dividend, so the remainder of each
        monomial is computed once and cached on the ring; the remainder
        of a polynomial is then the scalar combination of per-monomial
        remainders.
        """
        if self.relation is None:
            return {m: c for m, c in terms.items() if not c.is_zero()}
        lm = self._rel_lm
        out: dict = {}
        for m, c in terms.items():
            if c.is_zero():
                continue
            if not _divides(lm, m):
                nc = out.get(m)
                nc = c if nc is None else nc + c
                if nc.is_zero():
                    out.pop(m, None)
                else:
                    out[m] = nc
                continue
            for rm, rc in self._monomial_nf(m).items():
                v = c * rc
                nc = out.get(rm)
                nc = v if nc is None else nc + v
                if nc.is_zero():
                    out.pop(rm, None)
                else:
                    out[rm] = nc
        return out

    def _monomial_nf(self, m: Monomial) -> dict:
        """Cached remainder of a single monomial divisible by the lead."""
        got = self._nf_cache.get(m)
        if got is not None:
            return got
        lm = self._rel_lm
        q = _mono_div(m, lm)
        acc: dict = {}
        for rm, rc in self.relation.terms.items():
            if rm == lm:
                continue
            t = _mono_mul(q, rm)
            if _divides(lm, t):
                for m2, c2 in self._monomial_nf(t).items():
                    v = -rc * c2
                    nc = acc.get(m2)
                    nc = v if nc is None else nc + v
                    if nc.is_zero():
                        acc.pop(m2, None)
                    else:
                        acc[m2] = nc
            else:
                nc = acc.get(t)
                nc = -rc if nc is None else nc - rc
                if nc.is_zero():
                    acc.pop(t, None)
                else:
                    acc[t] = nc
        self._nf_cache[m] = acc
        return acc

    def _monomial_nf_ints(self, m: Monomial) -> tuple:
        """The remainder of a monomial as a common-denominator int table.

        Returns (den, items) where items is a tuple of (monomial, re, im)
        integer rows and the remainder is sum of (re + im*i)/den * monomial.
        Used by the integer fast path of multiplication.
        """
        got = self._nf_cache_ints.get(m)
        if got is not None:
            return got
        nf = self._monomial_nf(m)
        den = 1
        for c in nf.values():
            den = den * c.d // _gcd(den, c.d)
        items = tuple(
            (rm, c.an * (den // c.d), c.bn * (den // c.d)) for rm, c in nf.items()
        )
        self._nf_cache_ints[m] = (den, items)
        return den, items

    def _normal_form_ints(self, raw: dict, den: int) -> dict:
        """Normal form of {monomial: [re, im]} integer pairs over 1/den.

        Counterpart of _normal_form for the accumulator layout used by
        RingElement.__mul__; builds one Scalar per surviving monomial.
        """
        if self.relation is None:
            return {
                m: Scalar._raw(v[0], v[1], den)
                for m, v in raw.items()
                if v[0] or v[1]
            }
        lm = self._rel_lm
        single = self._lm_single
        direct = []
        reduced = []
        scale = 1
        for m, v in raw.items():
            a, b = v
            if a == 0 and b == 0:
                continue
            if m[single[0]] >= single[1] if single else _divides(lm, m):
                dm, items = self._monomial_nf_ints(m)
                reduced.append((a, b, dm, items))
                scale = scale * dm // _gcd(scale, dm)
            else:
                direct.append((m, a, b))
        acc: dict = {}
        get = acc.get
        for m, a, b in direct:
            v = get(m)
            if v is None:
                acc[m] = [a * scale, b * scale]
            else:
                v[0] += a * scale
                v[1] += b * scale
        for a, b, dm, items in reduced:
            s = scale // dm
            aa = a * s
            bb = b * s
            for rm, ra, rb in items:
                v = get(rm)
                if v is None:
                    acc[rm] = [aa * ra - bb * rb, aa * rb + bb * ra]
                else:
                    v[0] += aa * ra - bb * rb
                    v[1] += aa * rb + bb * ra
        dd = den * scale
        return {
            m: Scalar._raw(v[0], v[1], dd) for m, v in acc.items() if v[0] or v[1]
        }

    # -- identity ------------------------------------------------------

    def same_as(self, other: "GradedRing") -> bool:
        rel_a = None if self.relation is None else sorted(self.relation.terms.items())
        rel_b = None if other.relation is None else sorted(other.relation.terms.items())
        return (
            self.variables == other.variables
            and self.degrees == other.degrees
            and self.grading == other.grading
            and rel_a == rel_b
        )

    def __repr__(self) -> str:
        rel = f"/({self.relation})" if self.relation is not None else ""
        return f"GradedRing({','.join(self.variables)}; {self.grading}){rel}"


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(map(_add, a, b))


def _mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


class RingElement:
    """A sparse polynomial in normal form; immutable in practice."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: GradedRing, terms: dict, _normalize: bool = True):
        self.ring = ring
        self.terms = ring._normal_form(terms) if _normalize else terms
        self._hash = None

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "RingElement") -> "RingElement":
        out = dict(self.terms)
        for m, c in other.terms.items():
            nc = out.get(m)
            nc = c if nc is None else nc + c
            if nc.is_zero():
                out.pop(m, None)
            else:
                out[m] = nc
        return RingElement(self.ring, out, _normalize=False)

    def __sub__(self, other: "RingElement") -> "RingElement":
        return self + (-other)

    def __neg__(self) -> "RingElement":
        return RingElement(
            self.ring, {m: -c for m, c in self.terms.items()}, _normalize=False
        )

    def __mul__(self, other: "RingElement") -> "RingElement":
        # Accumulate over a common denominator in plain integers and
        # only build Scalars once per output monomial; per-term Scalar
        # construction dominates profiles otherwise.
        ta, tb = self.terms, other.terms
        if not ta or not tb:
            return self.ring.zero()
        da = db = 1
        for c in ta.values():
            if c.d != 1:
                da = da * c.d // _gcd(da, c.d)
        for c in tb.values():
            if c.d != 1:
                db = db * c.d // _gcd(db, c.d)
        fa = [(m, c.an * (da // c.d), c.bn * (da // c.d)) for m, c in ta.items()]
        fb = [(m, c.an * (db // c.d), c.bn * (db // c.d)) for m, c in tb.items()]
        out: dict = {}
        get = out.get
        for m1, a1, b1 in fa:
            if b1 == 0:
                for m2, a2, b2 in fb:
                    m = tuple(map(_add, m1, m2))
                    v = get(m)
                    if v is None:
                        out[m] = [a1 * a2, a1 * b2]
                    else:
                        v[0] += a1 * a2
                        v[1] += a1 * b2
            else:
                for m2, a2, b2 in fb:
                    m = tuple(map(_add, m1, m2))
                    v = get(m)
                    if v is None:
                        out[m] = [a1 * a2 - b1 * b2, a1 * b2 + b1 * a2]
                    else:
                        v[0] += a1 * a2 - b1 * b2
                        v[1] += a1 * b2 + b1 * a2
        nf = self.ring._normal_form_ints(out, da * db)
        return RingElement(self.ring, nf, _normalize=False)

    def scale(self, c: Scalar) -> "RingElement":
        if c.is_zero():
            return self.ring.zero()
        return RingElement(
            self.ring, {m: c * v for m, v in self.terms.items()}, _normalize=False
        )

    def __pow__(self, n: int) -> "RingElement":
        if n < 0:
            raise InvalidInput("negative powers are not ring elements")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def derivative(self, var: str) -> "RingElement":
        """Formal partial derivative of the normal-form representative."""
        k = self.ring._index[var]
        out: dict = {}
        for m, c in self.terms.items():
            e = m[k]
            if e == 0:
                continue
            dm = list(m)
            dm[k] = e - 1
            out[tuple(dm)] = c * Scalar(e)
        return RingElement(self.ring, out)

    # -- structure -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_scalar(self) -> bool:
        return not self.terms or set(self.terms) == {(0,) * self.ring.nvars}

    def scalar_part(self) -> Scalar:
        return self.terms.get((0,) * self.ring.nvars, Scalar(0))

    def gamma_degree(self, strict: bool = True) -> int | None:
        """Common Gamma-degree of all monomials, or raise Inhomogeneous.

        Zero is homogeneous of every degree; by convention returns 0.
        With strict=False returns None instead of raising.
        """
        degs = {self.ring.monomial_gamma(m) for m in self.terms}
        if not degs:
            return 0
        if len(degs) > 1:
            if strict:
                raise Inhomogeneous(f"inhomogeneous element {self}: degrees {sorted(degs)}")
            return None
        return degs.pop()

    def has_gamma_degree(self, d: int) -> bool:
        """True when every monomial has Gamma-degree d (zero passes)."""
        return all(self.ring.deg_eq(self.ring.monomial_gamma(m), d) for m in self.terms)

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def leading_term(self) -> tuple[Monomial, Scalar]:
        if not self.terms:
            raise InvalidInput("leading term of zero")
        m = max(self.terms, key=monomial_key)
        return m, self.terms[m]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RingElement)
            and self.ring.same_as(other.ring)
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(sorted(self.terms.items())))
        return self._hash

    # -- printing ------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=monomial_key, reverse=True):
            c = self.terms[m]
            mono = _mono_str(self.ring, m)
            parts.append(_term_str(c, mono))
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self) -> str:
        return f"<{self}>"


def _mono_str(ring: GradedRing, m: Monomial) -> str:
    pieces = []
    for v, e in zip(ring.variables, m):
        if e == 1:
            pieces.append(v)
        elif e > 1:
            pieces.append(f"{v}^{e}")
    return "*".join(pieces)


def _term_str(c: Scalar, mono: str) -> str:
    if not mono:
        cs = str(c)
        return f"({cs})" if (c.re != 0 and c.im != 0) else cs
    if c == Scalar(1):
        return mono
    if c == Scalar(-1):
        return f"-{mono}"
    cs = str(c)
    if c.re != 0 and c.im != 0:
        cs = f"({cs})"
    return f"{cs}*{mono}"


# ---------------------------------------------------------------------------
# parser: +, -, *, ^, integer and rational literals, the literal i,
# parentheses and unary minus.  Unicode minus is normalized.
# ---------------------------------------------------------------------------

_TOKEN_RE = _re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    text = text.replace("−", "-").replace("⋅", "*")
    tokens = []
    pos = 0
    while pos < len(text):
        mt = _TOKEN_RE.match(text, pos)
        if mt is None:
            if text[pos:].strip() == "":
                break
            raise InvalidInput(f"cannot tokenize polynomial at {text[pos:]!r}")
        pos = mt.end()
        if mt.group("num") is not None:
            tokens.append(("num", mt.group("num")))
        elif mt.group("name") is not None:
            tokens.append(("name", mt.group("name")))
        else:
            tokens.append(("op", mt.group("op")))
    tokens.append(("end", ""))
    return tokens


class _Parser:
    """Recursive descent over the tiny expression grammar.

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*      -- '/' only scalar/scalar
    factor := atom ('^' integer)?  |  '-' factor
    atom   := integer | 'i' | variable | '(' expr ')'
    """

    def __init__(self, ring: GradedRing, tokens: list[tuple[str, str]]):
        self.ring = ring
        self.toks = tokens
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def expr(self) -> RingElement:
        node = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.take()
            rhs = self.term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term(self) -> RingElement:
        node = self.factor()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            _, op = self.take()
            rhs = self.factor()
            if op == "*":
                node = node * rhs
            else:
                if not rhs.is_scalar() or rhs.is_zero():
                    raise InvalidInput("'/' only divides by nonzero scalars")
                node = node.scale(rhs.scalar_part().inv())
        return node

    def factor(self) -> RingElement:
        if self.peek() == ("op", "-"):
            self.take()
            return -self.factor()
        node = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise InvalidInput("'^' needs a nonnegative integer exponent")
            node = node ** int(val)
        return node

    def atom(self) -> RingElement:
        kind, val = self.take()
        if kind == "num":
            return self.ring.scalar(Scalar(int(val)))
        if kind == "name":
            if val == "i":
                return self.ring.scalar(Scalar(0, 1))
            return self.ring.var(val)
        if (kind, val) == ("op", "("):
            node = self.expr()
            if self.take() != ("op", ")"):
                raise InvalidInput("unbalanced parentheses")
            return node
        raise InvalidInput(f"unexpected token {val!r} in polynomial")


def _parse_polynomial(ring: GradedRing, text: str) -> RingElement:
    if not isinstance(text, str) or not text.strip():
        raise InvalidInput("empty polynomial string")
    parser = _Parser(ring, _tokenize(text))
    node = parser.expr()
    if parser.peek() != ("end", ""):
        raise InvalidInput(f"trailing input in polynomial {text!r}")
    return node


def ring_normal_form(text_or_terms, ring: GradedRing) -> RingElement:
    """Build the canonical normal form of a raw polynomial.

    Accepts a string in the expression grammar or a raw exponent->Scalar
    dict; returns the reduced RingElement.
    """
    if isinstance(text_or_terms, str):
        return ring.from_string(text_or_terms)
    return ring.element(dict(text_or_terms))


def ring_mul(p: RingElement, q: RingElement) -> RingElement:
    """Product in the ring (normal-formed); named entry point."""
    return p * q


def gamma_degree(p: RingElement) -> int:
    """The common even Gamma-degree of p's monomials (Inhomogeneous if mixed)."""
    return p.gamma_degree()
