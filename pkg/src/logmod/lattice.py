"""Exact integer linear algebra and rational polyhedral cones.

Everything here works with Python ints (arbitrary precision) and
``fractions.Fraction``; there is no floating point anywhere.  Vectors are
plain tuples of ints.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd
from typing import Iterable, Sequence

Vector = tuple  # tuple[int, ...]


class LatticeError(ValueError):
    """Invalid input to a lattice or cone operation."""


# ---------------------------------------------------------------------------
# vectors

def vec(v: Iterable[int]) -> Vector:
    return tuple(int(x) for x in v)


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def add(u, v) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u, v) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def neg(u) -> Vector:
    return tuple(-a for a in u)


def scale(c: int, u) -> Vector:
    return tuple(c * a for a in u)


def zero(n: int) -> Vector:
    return (0,) * n


def content(v) -> int:
    return reduce(gcd, v, 0)


def primitive(v) -> Vector:
    g = content(v)
    if g == 0:
        raise LatticeError("zero vector has no primitive generator")
    return tuple(a // g for a in v)


# ---------------------------------------------------------------------------
# matrices

@dataclass(frozen=True)
class IntMatrix:
    """Integer matrix stored row-major; shapes with zero rows/cols are fine."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise LatticeError("entries do not match the declared shape")

    @classmethod
    def from_rows(cls, rows, cols: int | None = None) -> "IntMatrix":
        rows = tuple(vec(r) for r in rows)
        if cols is None:
            if not rows:
                raise LatticeError("column count needed for an empty matrix")
            cols = len(rows[0])
        return cls(len(rows), cols, rows)

    @classmethod
    def from_columns(cls, columns, rows: int | None = None) -> "IntMatrix":
        columns = [vec(c) for c in columns]
        if rows is None:
            if not columns:
                raise LatticeError("row count needed for an empty matrix")
            rows = len(columns[0])
        return cls.from_rows(zip(*columns), len(columns)) if columns else cls.zeros(rows, 0)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, m: int, n: int) -> "IntMatrix":
        return cls(m, n, tuple((0,) * n for _ in range(m)))

    @property
    def shape(self):
        return self.rows, self.cols

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else tuple(() for _ in range(self.cols)))

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list:
        return [self.column(j) for j in range(self.cols)]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def apply(self, v) -> Vector:
        if len(v) != self.cols:
            raise LatticeError(f"vector of length {len(v)} does not fit a {self.rows}x{self.cols} matrix")
        return tuple(dot(r, v) for r in self.entries)

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise LatticeError("matrix shapes do not compose")
            ocols = other.columns()
            return IntMatrix(self.rows, other.cols,
                             tuple(tuple(dot(r, c) for c in ocols) for r in self.entries))
        return self.apply(other)

    def det(self) -> int:
        if self.rows != self.cols:
            raise LatticeError("determinant of a non-square matrix")
        return _det([list(r) for r in self.entries])

    def is_unimodular(self) -> bool:
        return self.rows == self.cols and abs(self.det()) == 1

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(self.rows, self.cols + other.cols,
                         tuple(a + b for a, b in zip(self.entries, other.entries)))

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def select_rows(self, idx) -> "IntMatrix":
        return IntMatrix(len(idx), self.cols, tuple(self.entries[i] for i in idx))

    def select_columns(self, idx) -> "IntMatrix":
        return IntMatrix(self.rows, len(idx), tuple(tuple(r[j] for j in idx) for r in self.entries))

    def tolist(self) -> list:
        return [list(r) for r in self.entries]


def _det(a) -> int:
    """Bareiss fraction-free determinant."""
    n = len(a)
    if n == 0:
        return 1
    a = [row[:] for row in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rational_rank(vectors) -> int:
    return len(hnf_basis(vectors))


def rational_solve(rows, rhs):
    """Solve a square nonsingular rational system; returns Fractions or None if singular."""
    n = len(rows)
    a = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return None
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [a[i][n] for i in range(n)]


def inverse_unimodular(M: IntMatrix) -> IntMatrix:
    n = M.rows
    cols = [rational_solve(M.entries, [int(i == j) for i in range(n)]) for j in range(n)]
    if any(c is None for c in cols) or any(x.denominator != 1 for c in cols for x in c):
        raise LatticeError("matrix is not unimodular")
    return IntMatrix.from_columns([[int(x) for x in c] for c in cols], n)


# ---------------------------------------------------------------------------
# normal forms

def snf(A: IntMatrix):
    """Smith normal form: returns ``(D, U, V)`` with ``D == U @ A @ V``.

    ``D`` is diagonal with nonnegative entries ``d_1 | d_2 | ...`` and ``U``, ``V``
    are unimodular.
    """
    m, n = A.shape
    D = [list(r) for r in A.entries]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for r in D:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    for t in range(min(m, n)):
        nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            # bring the smallest nonzero entry of row t / column t to the pivot
            cand = [(abs(D[i][t]), i, t) for i in range(t, m) if D[i][t]]
            cand += [(abs(D[t][j]), t, j) for j in range(t, n) if D[t][j]]
            _, i, j = min(cand)
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            p = D[t][t]
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
            if any(D[i][t] for i in range(t + 1, m)) or any(D[t][j] for j in range(t + 1, n)):
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return (IntMatrix.from_rows(D, n), IntMatrix.from_rows(U, m), IntMatrix.from_rows(V, n))


def diagonal(D: IntMatrix) -> list:
    return [D[i, i] for i in range(min(D.shape)) if D[i, i] != 0]


def hnf_basis(vectors, n: int | None = None) -> tuple:
    """Canonical basis (row Hermite normal form) of the lattice spanned by ``vectors``.

    Pivots are positive and entries above a pivot are reduced into ``[0, pivot)``.
    """
    A = [list(v) for v in vectors if any(v)]
    if not A:
        return ()
    n = len(A[0]) if n is None else n
    r = 0
    for col in range(n):
        while True:
            nz = [i for i in range(r, len(A)) if A[i][col]]
            if not nz:
                break
            i = min(nz, key=lambda k: (abs(A[k][col]), k))
            A[r], A[i] = A[i], A[r]
            clean = True
            for k in range(r + 1, len(A)):
                if A[k][col]:
                    q = A[k][col] // A[r][col]
                    A[k] = [a - q * b for a, b in zip(A[k], A[r])]
                    clean = clean and A[k][col] == 0
            if clean:
                break
        if r < len(A) and A[r][col]:
            if A[r][col] < 0:
                A[r] = [-a for a in A[r]]
            for k in range(r):
                q = A[k][col] // A[r][col]
                if q:
                    A[k] = [a - q * b for a, b in zip(A[k], A[r])]
            r += 1
            if r == len(A):
                break
    return tuple(tuple(A[i]) for i in range(r))


def _pivot(row) -> int:
    return next(i for i, x in enumerate(row) if x)


def reduce_mod(v, basis) -> Vector:
    """Canonical representative of ``v`` modulo a lattice given by its HNF basis."""
    v = list(v)
    for b in basis:
        p = _pivot(b)
        q = v[p] // b[p]
        if q:
            v = [x - q * y for x, y in zip(v, b)]
    return tuple(v)


def in_lattice(v, basis) -> bool:
    return not any(reduce_mod(v, basis))


def integer_kernel(A: IntMatrix) -> tuple:
    """HNF basis of the saturated lattice ``{x in Z^n : A x = 0}``."""
    D, _, V = snf(A)
    r = len(diagonal(D))
    return hnf_basis([V.column(j) for j in range(r, A.cols)], A.cols)


def orthogonal_lattice(vectors, n: int) -> tuple:
    """HNF basis of the integer vectors orthogonal to every vector given."""
    vectors = [v for v in vectors if any(v)]
    if not vectors:
        return hnf_basis([tuple(int(i == j) for j in range(n)) for i in range(n)], n)
    return integer_kernel(IntMatrix.from_rows(vectors, n))


def saturation_basis(vectors, n: int) -> tuple:
    """HNF basis of ``span_R(vectors) ∩ Z^n``."""
    return orthogonal_lattice(orthogonal_lattice(vectors, n), n)


def solve_linear(A: IntMatrix, b):
    """Integer solutions of ``A x = b``.

    Returns ``None`` when there is no integer solution, otherwise
    ``(particular, kernel_basis)`` with the kernel basis in HNF.
    """
    b = vec(b)
    if len(b) != A.rows:
        raise LatticeError(f"right-hand side has length {len(b)}, expected {A.rows}")
    D, U, V = snf(A)
    d = diagonal(D)
    r = len(d)
    c = U.apply(b)
    if any(c[i] % d[i] for i in range(r)) or any(c[i] for i in range(r, A.rows)):
        return None
    y = [c[i] // d[i] for i in range(r)] + [0] * (A.cols - r)
    x = V.apply(y)
    kernel = hnf_basis([V.column(j) for j in range(r, A.cols)], A.cols)
    return x, list(kernel)


def coker_invariants(A: IntMatrix):
    """``(free_rank, invariant_factors > 1)`` of ``Z^rows / column span of A``."""
    D, _, _ = snf(A)
    d = diagonal(D)
    return A.rows - len(d), [x for x in d if x > 1]


def primitive_and_extend(v):
    """Primitive vector on the ray of ``v`` and a unimodular matrix with it as first column.

    Where ``n1`` has a coordinate ``±1`` the completion uses standard basis
    vectors; otherwise a Euclid-based completion is shifted so that the
    complement has small nonnegative entries in the first pivot coordinate.
    ``det(B)`` is made ``+1`` whenever the rank is at least 2.
    """
    v = vec(v)
    if not any(v):
        raise LatticeError("cannot extend the zero vector to a basis")
    n1 = primitive(v)
    r = len(n1)
    unit = next((i for i, x in enumerate(n1) if abs(x) == 1), None)
    if unit is not None:
        cols = [n1] + [tuple(int(i == j) for i in range(r)) for j in range(r) if j != unit]
    else:
        # U n1 V = e1 with V = [±1], so the first column of U^{-1} is ±n1
        _, U, _ = snf(IntMatrix.from_columns([n1], r))
        Uinv = inverse_unimodular(U)
        cols = [n1] + [Uinv.column(j) for j in range(1, r)]
        p = _pivot(n1)
        m = n1[p]
        cols = [n1] + [sub(c, scale(c[p] // abs(m) * (1 if m > 0 else -1), n1)) for c in cols[1:]]
    if r >= 2 and IntMatrix.from_columns(cols, r).det() < 0:
        cols[-1] = neg(cols[-1])
        if unit is None:
            c = cols[-1]
            cols[-1] = sub(c, scale(c[p] // abs(m) * (1 if m > 0 else -1), n1))
    B = IntMatrix.from_columns(cols, r)
    assert abs(B.det()) == 1
    return n1, B


def parallelepiped_points(V: Sequence[Vector]):
    """Lattice points ``sum l_i v_i`` with ``0 <= l_i < 1`` for a basis ``v`` of ``R^d``.

    The number of points returned equals ``|det(V)|``.
    """
    d = len(V)
    M = IntMatrix.from_columns(V, d)
    D, U, _ = snf(M)
    diag = [D[i, i] for i in range(d)]
    if 0 in diag:
        raise LatticeError("parallelepiped of a degenerate simplex")
    Uinv = inverse_unimodular(U)
    out = []
    for ks in itertools.product(*(range(x) for x in diag)):
        x = Uinv.apply(ks)
        lam = rational_solve(M.entries, x)
        frac = [l - (l.numerator // l.denominator) for l in lam]
        p = tuple(sum(Fraction(M[i, j]) * frac[j] for j in range(d)) for i in range(d))
        assert all(c.denominator == 1 for c in p)
        out.append(tuple(int(c) for c in p))
    return out


# ---------------------------------------------------------------------------
# cones

def _split(gens, n: int):
    """Equations and facets of the cone generated by ``gens``.

    Returns ``(E, F)``: ``E`` is the HNF basis of the integer vectors orthogonal
    to the span, ``F`` the facet normals as primitive vectors lying in the span
    (the orthogonal projection picks the representative), sorted.
    """
    gens = sorted({vec(g) for g in gens if any(g)})
    E = orthogonal_lattice(gens, n)
    d = n - len(E)
    if d == 0:
        return E, []
    # keep a spanning, small set of generators: extreme ones are enough but
    # finding them needs the facets, so work with all of them.
    facets = set()
    for sub_ in itertools.combinations(gens, d - 1):
        rows = list(sub_) + list(E)
        if rows:
            K = integer_kernel(IntMatrix.from_rows(rows, n))
        else:
            K = hnf_basis([tuple(int(i == j) for j in range(n)) for i in range(n)], n)
        if len(K) != 1:
            continue
        f = primitive(K[0])
        vals = [dot(f, g) for g in gens]
        if all(x >= 0 for x in vals):
            pass
        elif all(x <= 0 for x in vals):
            f = neg(f)
        else:
            continue
        # a facet must vanish on d-1 independent generators (guaranteed) and be
        # nonzero on some generator
        if any(dot(f, g) for g in gens):
            facets.add(f)
    # drop normals that are not facets (vanishing set not of dimension d-1)
    out = []
    for f in facets:
        zero_set = [g for g in gens if dot(f, g) == 0]
        if rational_rank(zero_set) == d - 1:
            out.append(f)
    return E, sorted(out)


def _pm(basis):
    return list(basis) + [neg(b) for b in basis]


@dataclass(frozen=True)
class Cone:
    """Rational polyhedral cone in ``R^ambient_rank`` in canonical double description.

    ``rays`` holds ``±b`` for the HNF basis ``b`` of the lineality lattice plus
    the extreme rays (projected orthogonally to the lineality space), and
    ``ineqs`` is the same data for the dual cone.  Both lists are sorted, so
    two cones are equal exactly when their dataclasses are equal.
    """

    ambient_rank: int
    rays: tuple
    ineqs: tuple

    @classmethod
    def from_generators(cls, n: int, gens) -> "Cone":
        gens = [vec(g) for g in gens]
        if any(len(g) != n for g in gens):
            raise LatticeError(f"generator of wrong length for rank {n}")
        E, F = _split(gens, n)
        L, R = _split(F + _pm(E), n)
        return cls(n, tuple(sorted(R + _pm(L))), tuple(sorted(F + _pm(E))))

    @classmethod
    def from_inequalities(cls, n: int, ineqs, equations=()) -> "Cone":
        dual = cls.from_generators(n, list(ineqs) + _pm([vec(e) for e in equations]))
        return dual.dual()

    @classmethod
    def full_space(cls, n: int) -> "Cone":
        return cls.from_generators(n, _pm([tuple(int(i == j) for j in range(n)) for i in range(n)]))

    @classmethod
    def origin(cls, n: int) -> "Cone":
        return cls.from_generators(n, [])

    def dual(self) -> "Cone":
        return Cone(self.ambient_rank, self.ineqs, self.rays)

    @cached_property
    def lineality(self) -> tuple:
        s = set(self.rays)
        return hnf_basis([r for r in self.rays if neg(r) in s], self.ambient_rank)

    @cached_property
    def equations(self) -> tuple:
        s = set(self.ineqs)
        return hnf_basis([r for r in self.ineqs if neg(r) in s], self.ambient_rank)

    @cached_property
    def extreme_rays(self) -> tuple:
        s = set(self.rays)
        return tuple(r for r in self.rays if neg(r) not in s)

    @cached_property
    def facets(self) -> tuple:
        s = set(self.ineqs)
        return tuple(f for f in self.ineqs if neg(f) not in s)

    @property
    def dim(self) -> int:
        return self.ambient_rank - len(self.equations)

    @property
    def is_pointed(self) -> bool:
        return not self.lineality

    @property
    def is_full(self) -> bool:
        return not self.equations

    def contains(self, x) -> bool:
        return all(dot(f, x) >= 0 for f in self.ineqs)

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(r) for r in other.rays)

    def in_relative_interior(self, x) -> bool:
        return self.contains(x) and all(dot(f, x) > 0 for f in self.facets)

    def intersect(self, other: "Cone") -> "Cone":
        return Cone.from_inequalities(self.ambient_rank, self.ineqs + other.ineqs)

    def face(self, functional) -> "Cone":
        """Face cut out by a functional that is nonnegative on the cone."""
        if any(dot(functional, r) < 0 for r in self.rays):
            raise LatticeError("functional is not nonnegative on the cone")
        return Cone.from_generators(self.ambient_rank, [r for r in self.rays if dot(functional, r) == 0])

    def interior_vector(self) -> Vector:
        """A lattice point in the relative interior (sum of the generators)."""
        return reduce(add, self.rays, zero(self.ambient_rank))

    def image(self, M: IntMatrix) -> "Cone":
        return Cone.from_generators(M.rows, [M.apply(r) for r in self.rays])

    def preimage(self, M: IntMatrix) -> "Cone":
        return Cone.from_inequalities(M.cols, [M.T.apply(f) for f in self.ineqs])


def dual_cone(c: Cone) -> Cone:
    return c.dual()


def cone_faces(c: Cone) -> list:
    """All faces of ``c`` (from the minimal face up to ``c``), sorted by dimension then rays."""
    seen = {c}
    todo = [c]
    while todo:
        cur = todo.pop()
        for f in cur.facets:
            face = cur.face(f)
            if face not in seen:
                seen.add(face)
                todo.append(face)
    return sorted(seen, key=lambda x: (x.dim, x.rays))


def triangulate(c: Cone) -> list:
    """Pulling triangulation of a pointed cone into simplicial cones (tuples of rays)."""
    if not c.is_pointed:
        raise LatticeError("cone has lineality; sharpen first")
    rays = c.extreme_rays
    if len(rays) == c.dim:
        return [rays]
    r0 = rays[0]
    out = []
    for f in c.facets:
        if dot(f, r0) == 0:
            continue
        for simplex in triangulate(c.face(f)):
            out.append((r0,) + simplex)
    return out


def _coordinates(basis, n):
    """Matrix with the basis vectors as columns."""
    return IntMatrix.from_columns(basis, n) if basis else IntMatrix.zeros(n, 0)


def _hilbert_full(c: Cone) -> list:
    cands = set(c.extreme_rays)
    for simplex in triangulate(c):
        cands.update(p for p in parallelepiped_points(simplex) if any(p))
    cands = sorted(cands)
    return [x for x in cands
            if not any(y != x and c.contains(sub(x, y)) for y in cands)]


def hilbert_basis(c: Cone, L=None) -> list:
    """Minimal generating set of the monoid ``c ∩ L`` (``L`` a list of basis vectors).

    ``L`` defaults to the whole lattice ``Z^n``.  The cone ``c ∩ span(L)`` must
    be pointed.
    """
    n = c.ambient_rank
    if L is None:
        L = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    L = [vec(b) for b in L]
    if rational_rank(L) != len(L):
        raise LatticeError("lattice basis is not of full column rank")
    B = _coordinates(L, n)
    pre = c.preimage(B)  # cone in coordinates of L
    if not pre.is_pointed:
        raise LatticeError("cone has lineality; sharpen first")
    k = len(L)
    S = saturation_basis(pre.rays, k)  # lattice basis of its span
    if not S:
        return []
    Bs = _coordinates(S, k)
    full = pre.preimage(Bs)
    out = [B.apply(Bs.apply(x)) for x in _hilbert_full(full)]
    return sorted(out)
