"""Seeded random instances, shared by the test-suite and ``logmod sample``."""
from __future__ import annotations

import random

from .lattice import IntMatrix, add, primitive, scale, zero
from .monoid import (
    AffineMonoid,
    MonoidIdeal,
    extend_fs,
    ideal_normalize,
    monoid_new,
    saturate,
)
from .morphism import MonoidHom, hom_new


def _vec(rng, n, lo, hi):
    return tuple(rng.randint(lo, hi) for _ in range(n))


def saturated_monoid(rng: random.Random, rank=None, max_gens=5, entry=3) -> AffineMonoid:
    """Saturation of a monoid with at most ``max_gens`` random generators."""
    n = rank if rank is not None else rng.randint(1, 3)
    k = rng.randint(1, max_gens)
    gens = [_vec(rng, n, -entry, entry) for _ in range(k)]
    return saturate(monoid_new(n, gens))


def sharp_monoid(rng: random.Random, rank=None, max_gens=4, entry=3, full=True) -> AffineMonoid:
    """Sharp saturated monoid; full rank in ``Z^rank`` when ``full``."""
    n = rank if rank is not None else rng.randint(1, 3)
    while True:
        k = rng.randint(n if full else 1, max(n, max_gens))
        # a random pointed cone: nonnegative vectors in random coordinates
        gens = [_vec(rng, n, 0, entry) for _ in range(k)]
        if rng.random() < 0.5:
            A = _unimodular(rng, n)
            gens = [A.apply(g) for g in gens]
        M = saturate(monoid_new(n, gens))
        if M.is_sharp and (not full or M.is_full) and M.gens:
            return M


def _unimodular(rng, n):
    A = IntMatrix.identity(n)
    rows = [list(r) for r in A.entries]
    for _ in range(rng.randint(0, 3)):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            continue
        c = rng.choice((-1, 1))
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    return IntMatrix.from_rows(rows, n)


def element(rng: random.Random, M: AffineMonoid, max_coeff=2):
    x = zero(M.rank)
    for g in M.gens:
        x = add(x, scale(rng.randint(0, max_coeff), g))
    return x


def lattice_element(rng: random.Random, M: AffineMonoid, coeff=2):
    x = zero(M.rank)
    for b in M.lattice:
        x = add(x, scale(rng.randint(-coeff, coeff), b))
    return x


def saturated_hom(rng: random.Random, entry=3) -> MonoidHom:
    """Random hom between saturated monoids (rank <= 3, at most 5 generators)."""
    Q = saturated_monoid(rng)
    m = rng.randint(1, 3)
    A = IntMatrix.from_rows([_vec(rng, Q.rank, -entry, entry) for _ in range(m)], Q.rank)
    extra = [_vec(rng, m, -entry, entry) for _ in range(rng.randint(0, 2))]
    P = saturate(monoid_new(m, [A.apply(g) for g in Q.gens] + extra))
    return hom_new(Q, P, A)


def gp_extension(rng: random.Random, Q: AffineMonoid, count=None) -> AffineMonoid:
    """``Q<E>`` for random ``E`` in ``gp(Q)``; the group does not change."""
    k = count if count is not None else rng.randint(1, 2)
    E = [lattice_element(rng, Q) for _ in range(k)]
    return extend_fs(Q, E)


def ideal(rng: random.Random, Q: AffineMonoid, max_gens=3) -> MonoidIdeal:
    gens = []
    while not gens or not any(any(g) for g in gens):
        gens = [element(rng, Q) for _ in range(rng.randint(1, max_gens))]
    return ideal_normalize(Q, gens)


def local_finite_hom(rng: random.Random, rank=None, max_target_gens=5) -> MonoidHom:
    """gp-injective local hom of sharp saturated monoids with finite gp-cokernel."""
    n = rank if rank is not None else rng.randint(1, 3)
    while True:
        Q = sharp_monoid(rng, n, max_gens=3, entry=2)
        A = IntMatrix.from_rows([_vec(rng, n, -2, 2) for _ in range(n)], n)
        if A.det() == 0:
            continue
        images = [A.apply(g) for g in Q.gens]
        extra = []
        for _ in range(rng.randint(0, 2)):
            a, b = rng.choice(images), rng.choice(images)
            v = add(a, b)
            if any(v):
                extra.append(primitive(v) if rng.random() < 0.5 else v)
        if rng.random() < 0.3:
            extra.append(_vec(rng, n, -2, 2))
        P = saturate(monoid_new(n, images + extra))
        if not P.is_sharp or len(P.gens) > max_target_gens:
            continue
        h = hom_new(Q, P, A)
        if h.is_local and h.gp_injective:
            return h


def gp_injective_chart(rng: random.Random, Q: AffineMonoid) -> MonoidHom:
    """A random gp-injective chart ``Q -> P`` (often non-exact)."""
    n = Q.rank
    while True:
        A = _unimodular(rng, n)
        images = [A.apply(g) for g in Q.gens]
        extra = [_vec(rng, n, -2, 2) for _ in range(rng.randint(1, 2))]
        P = saturate(monoid_new(n, images + extra))
        h = hom_new(Q, P, A)
        if h.gp_injective and P.gens:
            return h


def exact_hom(rng: random.Random) -> MonoidHom:
    """A random exact hom: a random hom with its source replaced by the exact closure."""
    from .morphism import exact_closure

    h = saturated_hom(rng)
    return MonoidHom(exact_closure(h), h.target, h.matrix)
