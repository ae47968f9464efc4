"""Seeded random instances for the verification suites.

Everything here is deterministic in the seed: the same seed always
yields the same module, connection, or chain.  Modules are generated so
that delta^2 = -h·e holds by construction (Koszul-type factorizations,
optionally conjugated by a constant unipotent change of basis and
carrying a connection perturbation); a check_module pass is asserted at
generation time so a failure here is a generator bug, not a fuzz result.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .errors import InternalCheckFailure
from .forms import DiffForm, USeries, _nf_monomials_up_to
from .hochschild import CategoryData, ChainSum, chain
from .matform import Mat
from .modules import (
    Connection,
    CurvedAlgebra,
    CurvedModule,
    check_module,
    connection_with_mu,
    levi_civita,
)
from .rings import GradedRing, RingElement
from .scalars import Scalar

_NAMES = ("x", "y", "z")

_COEFFS = (
    Scalar(1),
    Scalar(-1),
    Scalar(2),
    Scalar(Fraction(-1, 2)),
    Scalar(0, 1),  # i
)


def _rand_coeff(rng: random.Random) -> Scalar:
    return rng.choice(_COEFFS)


def random_ring(rng: random.Random, *, max_vars: int = 3, grading: str | None = None) -> GradedRing:
    nvars = rng.randint(1, max_vars)
    if grading is None:
        grading = rng.choice(("Z2", "Z2", "Z"))
    names = _NAMES[:nvars]
    if grading == "Z":
        # give the last variable weight two half the time so that
        # curvatures of Gamma-degree two have something to be made of
        degrees = [0] * nvars
        if rng.random() < 0.5:
            degrees[-1] = 2
    else:
        degrees = [0] * nvars
    return GradedRing(names, degrees, grading=grading)


def _monomials(ring: GradedRing, max_deg: int, gamma: int | None):
    """Monomial tuples of total degree <= max_deg, optionally filtered to
    an exact Gamma-degree (exact as integers; Z/2 rings pass gamma=None)."""
    out = []
    for m in _nf_monomials_up_to(ring, max_deg):
        if gamma is None or ring.monomial_gamma(m) == gamma:
            out.append(m)
    return out


def random_poly(
    rng: random.Random,
    ring: GradedRing,
    *,
    max_deg: int = 2,
    gamma: int | None = None,
    max_terms: int = 2,
    allow_zero: bool = False,
) -> RingElement:
    pool = _monomials(ring, max_deg, gamma)
    if not pool:
        return ring.zero()
    k = rng.randint(0 if allow_zero else 1, max_terms)
    terms = {}
    for m in rng.sample(pool, min(k, len(pool))):
        terms[m] = _rand_coeff(rng)
    return ring.element(terms)


# -- modules -----------------------------------------------------------


def _koszul_rank2(rng: random.Random, ring: GradedRing):
    """delta = [[0, p], [q, 0]] on basis degrees (0, d1): h = -p·q."""
    if ring.grading == "Z":
        d1 = rng.choice((1, -1))
        p = random_poly(rng, ring, gamma=1 - d1)
        q = random_poly(rng, ring, gamma=1 + d1, allow_zero=True)
    else:
        d1 = 1
        p = random_poly(rng, ring)
        q = random_poly(rng, ring)
    delta = Mat.from_stored(ring, (0, d1), [["0", str(p)], [str(q), "0"]])
    return (0, d1), delta, [(p, q)]


def _tensor_delta(ring: GradedRing, A: Mat, B: Mat) -> Mat:
    """Graded tensor of two odd operators: delta(v (x) w) =
    (delta_1 v) (x) w + (-1)^{|v|} v (x) (delta_2 w)."""
    d1, d2 = A.target_degrees, B.target_degrees
    n1, n2 = len(d1), len(d2)
    degrees = [d1[i] + d2[l] for i in range(n1) for l in range(n2)]
    z = USeries.zero(ring)
    entries = [[z for _ in range(n1 * n2)] for _ in range(n1 * n2)]
    for i in range(n1):
        for j in range(n1):
            a = A.entry(i, j)
            if not a.is_zero():
                for l in range(n2):
                    entries[i * n2 + l][j * n2 + l] += a
    for j in range(n1):
        sign = Scalar((-1) ** (d1[j] % 2))
        for t in range(n2):
            for s in range(n2):
                b = B.entry(t, s)
                if not b.is_zero():
                    entries[j * n2 + t][j * n2 + s] += b.scale(sign)
    return Mat(ring, degrees, degrees, entries)


def _unipotent(rng: random.Random, ring: GradedRing, degrees) -> Mat:
    """id + N with N a constant strictly-nilpotent degree-0 entry."""
    g = Mat.identity(ring, degrees)
    pairs = [
        (t, s)
        for t in range(len(degrees))
        for s in range(len(degrees))
        if t != s and ring.deg_eq(degrees[t], degrees[s])
    ]
    if not pairs:
        return g
    t, s = rng.choice(pairs)
    n = Mat.zero(ring, degrees, degrees)
    n.entries[t][s] = USeries.from_ring(ring.scalar(_rand_coeff(rng)))
    return g + n


def _invert_unipotent(g: Mat) -> Mat:
    n = g - Mat.identity(g.ring, g.target_degrees)
    acc = Mat.identity(g.ring, g.target_degrees)
    power = Mat.identity(g.ring, g.target_degrees)
    for k in range(1, len(g.target_degrees) + 1):
        power = power @ n
        if power.is_zero():
            break
        acc = acc + power.scale(Scalar((-1) ** k))
    return acc


def random_mu(rng: random.Random, ring: GradedRing, degrees) -> Mat:
    """A diagonal operator-degree -1 perturbation: entries are
    (polynomial in the weight-zero variables)·d(x_v)."""
    zero_vars = [n for n, d in zip(ring.variables, ring.degrees) if d == 0]
    rows = []
    for d in degrees:
        entry = DiffForm.zero(ring)
        if zero_vars and rng.random() < 0.7:
            v = rng.choice(zero_vars)
            coeff = random_poly(rng, ring, max_deg=1, gamma=0 if ring.grading == "Z" else None)
            entry = DiffForm.d_var(ring, v).scale_ring(coeff)
        rows.append(entry)
    z = DiffForm.zero(ring)
    stored = [
        [rows[i] if i == j else z for j in range(len(degrees))]
        for i in range(len(degrees))
    ]
    return Mat.from_stored(ring, degrees, stored)


def random_module_instance(seed: int):
    """A seeded (module, connection) pair with delta^2 = -h·e.

    Mixes gradings, ranks two and four, constant changes of basis and
    connection perturbations; suitable for the route-equivalence and
    identity suites.
    """
    rng = random.Random(f"module:{seed}")
    ring = random_ring(rng)
    degrees, delta, factors = _koszul_rank2(rng, ring)
    if rng.random() < 0.45:
        d2, delta2, factors2 = _koszul_rank2(rng, ring)
        delta = _tensor_delta(ring, delta, delta2)
        degrees = tuple(delta.target_degrees)
        factors = factors + factors2
    h = ring.zero()
    for p, q in factors:
        h = h - p * q
    alg = CurvedAlgebra(ring, h)
    if rng.random() < 0.4:
        g = _unipotent(rng, ring, degrees)
        delta = g @ delta @ _invert_unipotent(g)
    M = CurvedModule(alg, degrees, delta)
    verdict = check_module(M)
    if not verdict.ok:
        raise InternalCheckFailure(
            "random module generator produced an invalid instance: "
            + "; ".join(verdict.failures)
        )
    if rng.random() < 0.5:
        mu = random_mu(rng, ring, degrees)
        C = connection_with_mu(M, mu) if not mu.is_zero() else levi_civita(M)
    else:
        C = levi_civita(M)
    return M, C


def xy_mu_perturbations(seed: int, count: int = 3):
    """Seeded nonzero perturbations for the xy factorization's module."""
    rng = random.Random(f"xy-mu:{seed}")
    ring = GradedRing(("x", "y"), (0, 0), grading="Z2")
    out = []
    while len(out) < count:
        mu = random_mu(rng, ring, (0, 1))
        if not mu.is_zero():
            out.append(mu)
    return out


# -- chains ------------------------------------------------------------


def _constant_idempotent(rng: random.Random, ring: GradedRing, degrees) -> Mat:
    """g·diag(1..1,0..0)·g^{-1} for a constant unipotent g: a genuinely
    non-free presentation with polynomial-free entries."""
    rank = rng.randint(1, len(degrees))
    e0 = Mat.zero(ring, degrees, degrees)
    one = USeries.from_ring(ring.one())
    for k in range(rank):
        e0.entries[k][k] = one
    g = _unipotent(rng, ring, degrees)
    return g @ e0 @ _invert_unipotent(g)


def random_chain_setup(seed: int, *, max_objects: int = 2, max_size: int = 3, max_n: int = 3):
    """A seeded (category, connections, chain sum) triple.

    The category has one or two trivial-differential objects over a
    relation-free ring with a (possibly zero) curvature h; slots are
    random e-supported matrices, split into homogeneous components by
    the chain constructor.
    """
    rng = random.Random(f"chain:{seed}")
    ring = random_ring(rng, grading="Z2")
    h = random_poly(rng, ring, allow_zero=True) if rng.random() < 0.8 else ring.zero()
    alg = CurvedAlgebra(ring, h)
    objects = []
    conns = []
    for _ in range(rng.randint(1, max_objects)):
        size = rng.randint(1, max_size)
        degrees = tuple(rng.randint(0, 1) for _ in range(size))
        if rng.random() < 0.35:
            e = _constant_idempotent(rng, ring, degrees)
        else:
            e = Mat.identity(ring, degrees)
        M = CurvedModule(alg, degrees, Mat.zero(ring, degrees, degrees), e=e)
        objects.append(M)
        if rng.random() < 0.5:
            mu = M.e @ random_mu(rng, ring, degrees) @ M.e
            conns.append(
                connection_with_mu(M, mu) if not mu.is_zero() else levi_civita(M)
            )
        else:
            conns.append(levi_civita(M))
    cat = CategoryData(alg, objects)
    n = rng.randint(0, max_n)
    cycle = [rng.randrange(len(objects)) for _ in range(n + 1)]
    slots = []
    for i in range(n + 1):
        tgt, src = cycle[i], cycle[(i + 1) % (n + 1)]
        dt, ds = objects[tgt].degrees, objects[src].degrees
        raw = Mat(
            ring,
            dt,
            ds,
            [
                [random_poly(rng, ring, max_terms=1, allow_zero=True) for _ in ds]
                for _ in dt
            ],
        )
        slots.append(objects[tgt].e @ raw @ objects[src].e)
    c = chain(cat, slots[0], slots[1:], objects=cycle, coeff=_rand_coeff(rng))
    return cat, conns, c


def random_ring_chain(seed: int, *, max_n: int = 3, max_vars: int = 3, with_h: bool = False):
    """A seeded chain over the one-object category of the ring itself
    (1x1 slots), with the flat de Rham connection."""
    rng = random.Random(f"ring-chain:{seed}")
    ring = random_ring(rng, max_vars=max_vars, grading="Z2")
    h = random_poly(rng, ring) if with_h else ring.zero()
    alg = CurvedAlgebra(ring, h)
    M = CurvedModule(alg, (0,), Mat.zero(ring, (0,), (0,)))
    cat = CategoryData(alg, [M])
    n = rng.randint(0, max_n)
    head = random_poly(rng, ring)
    tail = [random_poly(rng, ring) for _ in range(n)]
    c = chain(cat, head, tail, coeff=_rand_coeff(rng))
    return cat, [levi_civita(M)], c
