"""Slow, independent reference computations used to check logmod.

Nothing here imports logmod. Everything is exact (ints and Fractions) and
written for clarity over speed.
"""
from fractions import Fraction
from itertools import combinations, product
from math import gcd


def det(rows):
    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    d = Fraction(1)
    for i in range(n):
        p = next((k for k in range(i, n) if m[k][i] != 0), None)
        if p is None:
            return 0
        if p != i:
            m[i], m[p] = m[p], m[i]
            d = -d
        d *= m[i][i]
        for k in range(i + 1, n):
            f = m[k][i] / m[i][i]
            m[k] = [a - f * b for a, b in zip(m[k], m[i])]
    return int(d)


def rank(vectors):
    rows = [[Fraction(x) for x in v] for v in vectors]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        p = next((k for k in range(r, len(rows)) if rows[k][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        for k in range(len(rows)):
            if k != r and rows[k][c] != 0:
                f = rows[k][c] / rows[r][c]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        r += 1
    return r


def nullspace(rows, n):
    """Integer basis of the rational kernel of the matrix with the given rows."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(n):
        p = next((k for k in range(r, len(m)) if m[k][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        m[r] = [x / m[r][c] for x in m[r]]
        for k in range(len(m)):
            if k != r and m[k][c] != 0:
                f = m[k][c]
                m[k] = [a - f * b for a, b in zip(m[k], m[r])]
        pivots.append(c)
        r += 1
    out = []
    for free in (c for c in range(n) if c not in pivots):
        v = [Fraction(0)] * n
        v[free] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -m[i][free]
        den = 1
        for x in v:
            den = den * x.denominator // gcd(den, x.denominator)
        w = [int(x * den) for x in v]
        g = 0
        for x in w:
            g = gcd(g, x)
        out.append(tuple(x // g for x in w))
    return out


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


class ConeOracle:
    """Cone generated by ``gens``: equations of the span and all valid supporting
    functionals through ``d - 1`` generators. Intersecting those half spaces
    gives back the cone."""

    def __init__(self, gens, n):
        self.n = n
        gens = [tuple(g) for g in gens if any(g)]
        self.gens = gens
        self.eqs = nullspace(gens, n) if gens else [tuple(int(i == j) for j in range(n)) for i in range(n)]
        d = n - len(self.eqs)
        self.dim = d
        ineqs = set()
        if d > 0:
            for S in combinations(gens, d - 1):
                ns = nullspace(list(S) + self.eqs, n)
                if len(ns) != 1:
                    continue
                f = ns[0]
                vals = [dot(f, g) for g in gens]
                if all(v >= 0 for v in vals):
                    ineqs.add(f)
                elif all(v <= 0 for v in vals):
                    ineqs.add(tuple(-x for x in f))
        self.ineqs = sorted(ineqs)

    def __contains__(self, x):
        return all(dot(e, x) == 0 for e in self.eqs) and all(dot(f, x) >= 0 for f in self.ineqs)


def minors_gcd(vectors, r):
    g = 0
    n = len(vectors[0]) if vectors else 0
    for rows in combinations(vectors, r):
        for cols in combinations(range(n), r):
            g = gcd(g, det([[v[c] for c in cols] for v in rows]))
    return g


def in_group(x, gens):
    """Is ``x`` an integer combination of ``gens``? (gcd of maximal minors test)"""
    gens = [tuple(g) for g in gens if any(g)]
    if not any(x):
        return True
    r = rank(gens) if gens else 0
    if rank(gens + [tuple(x)]) != r:
        return False
    return minors_gcd(gens + [tuple(x)], r) == minors_gcd(gens, r)


class SaturatedOracle:
    """Membership in the saturation of the monoid generated by ``gens``."""

    def __init__(self, gens, n):
        self.gens = [tuple(g) for g in gens]
        self.cone = ConeOracle(gens, n)
        self._memo = {}

    def __contains__(self, x):
        x = tuple(x)
        if x not in self._memo:
            self._memo[x] = x in self.cone and in_group(x, self.gens)
        return self._memo[x]


def determinantal_divisors(rows):
    """Smith invariants via gcds of k x k minors."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    out = []
    prev = 1
    for k in range(1, min(m, n) + 1):
        g = 0
        for rs in combinations(range(m), k):
            for cs in combinations(range(n), k):
                g = gcd(g, det([[rows[i][j] for j in cs] for i in rs]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def box(n, bound):
    return product(range(-bound, bound + 1), repeat=n)


def representable(x, gens, _memo=None):
    """Is ``x`` a nonnegative integer combination of ``gens``? Requires all
    generators to be nonzero with nonnegative coordinates."""
    memo = {} if _memo is None else _memo
    x = tuple(x)
    if not any(x):
        return True
    if any(c < 0 for c in x):
        return False
    if x in memo:
        return memo[x]
    res = any(representable(tuple(a - b for a, b in zip(x, g)), gens, memo) for g in gens)
    memo[x] = res
    return res


def orthant_hilbert(gens, n):
    """Hilbert basis of cone(gens) ∩ Z^n for nonnegative generators.

    Every Hilbert basis element lies in a parallelepiped over the generators,
    so coordinates are bounded by the coordinatewise generator sums. An element
    is reducible iff ``x = y + z`` with ``y, z`` nonzero in the cone, and then
    ``0 <= y <= x`` coordinatewise.
    """
    C = ConeOracle(gens, n)
    top = [sum(g[i] for g in gens) for i in range(n)]
    pts = [p for p in product(*(range(t + 1) for t in top)) if any(p) and p in C]
    pset = set(pts)

    def reducible(x):
        for y in product(*(range(c + 1) for c in x)):
            if any(y) and y != x and y in pset:
                if tuple(a - b for a, b in zip(x, y)) in pset:
                    return True
        return False

    return sorted(p for p in pts if not reducible(p))


def hj_length(v1, v2):
    """Number of rays inserted by the minimal resolution of cone(v1, v2) in Z^2.

    Write the cone as cone(e2, n e1 - q e2) with 0 <= q < n and expand
    n / q = b1 - 1/(b2 - ...). For q = 0 the cone is already smooth.
    """
    n = abs(v1[0] * v2[1] - v1[1] * v2[0])
    if n == 1:
        return 0
    q = next(q for q in range(n) if all((a + q * b) % n == 0 for a, b in zip(v2, v1)))
    count = 0
    a, b = n, q
    while b:
        c = -(-a // b)
        count += 1
        a, b = b, c * b - a
    return count


def apply(rows, v):
    return tuple(dot(r, v) for r in rows)


def exactness_violation(q_gens, nq, p_gens, np_, rows, bound=10):
    """A lattice point ``v`` of gp(Q), coordinates within ``bound``, with
    ``h(v)`` in ``P`` but ``v`` outside ``Q`` (both saturated), or None."""
    Q = SaturatedOracle(q_gens, nq)
    Pc = ConeOracle(p_gens, np_)
    for v in box(nq, bound):
        if v in Q.cone:
            continue  # in gp(Q) and the cone means in Q
        if apply(rows, v) in Pc and in_group(v, q_gens):
            return v
    return None
