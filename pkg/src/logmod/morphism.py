"""Homomorphisms of affine monoids: exactness, integrality and fs push-outs."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property

from .lattice import (
    Cone,
    IntMatrix,
    add,
    coker_invariants,
    cone_faces,
    dot,
    hnf_basis,
    neg,
    parallelepiped_points,
    rational_rank,
    reduce_mod,
    snf,
    solve_linear,
    sub,
    triangulate,
    vec,
    zero,
    diagonal,
    primitive,
)
from .monoid import (
    AffineMonoid,
    MonoidError,
    _basis_matrix,
    faces,
    localize,
    monoid_new,
    right_inverse,
    saturated_monoid,
    sharpen,
    to_coordinates,
)

DEFAULT_BOUND = 8


class MorphismError(ValueError):
    """Invalid homomorphism data or unmet preconditions."""


class StrategyInapplicable(MorphismError):
    """An integrality strategy was asked for outside its preconditions."""


@dataclass(frozen=True)
class MonoidHom:
    """``h: Q -> P`` given by an integer matrix between the ambient lattices."""

    source: AffineMonoid
    target: AffineMonoid
    matrix: IntMatrix

    def __call__(self, x) -> tuple:
        return self.matrix.apply(x)

    @cached_property
    def gp_matrix(self) -> IntMatrix:
        """The map ``gp(Q) -> gp(P)`` in HNF-basis coordinates."""
        BQ = _basis_matrix(self.source.lattice, self.source.rank)
        BP = _basis_matrix(self.target.lattice, self.target.rank)
        cols = [to_coordinates(BP, self.matrix.apply(b)) for b in BQ.columns()]
        return IntMatrix.from_columns(cols, BP.cols) if cols else IntMatrix.zeros(BP.cols, 0)

    @property
    def gp_injective(self) -> bool:
        X = self.gp_matrix
        return rational_rank(X.columns()) == X.cols

    @cached_property
    def coker(self):
        return coker_invariants(self.gp_matrix)

    @cached_property
    def is_local(self) -> bool:
        P = self.target
        for g in self.source.gens:
            if P.cone.contains(neg(self(g))) and neg(g) not in self.source:
                return False
        return True

    def __repr__(self):
        return f"MonoidHom({self.source.gens} -> {self.target.gens}, matrix={self.matrix.tolist()})"


def hom_new(Q: AffineMonoid, P: AffineMonoid, matrix) -> MonoidHom:
    if not isinstance(matrix, IntMatrix):
        matrix = IntMatrix.from_rows(matrix, Q.rank)
    if matrix.shape != (P.rank, Q.rank):
        raise MorphismError(f"matrix shape {matrix.shape} does not match ranks ({P.rank}, {Q.rank})")
    for g in Q.gens:
        if matrix.apply(g) not in P:
            raise MorphismError(f"not a homomorphism into target: {g} maps to {matrix.apply(g)}")
    return MonoidHom(Q, P, matrix)


def identity_hom(M: AffineMonoid) -> MonoidHom:
    return MonoidHom(M, M, IntMatrix.identity(M.rank))


def compose(g: MonoidHom, f: MonoidHom) -> MonoidHom:
    """``g ∘ f``."""
    return MonoidHom(f.source, g.target, g.matrix @ f.matrix)


def image_monoid(A: IntMatrix, M: AffineMonoid) -> AffineMonoid:
    return monoid_new(A.rows, [A.apply(g) for g in M.gens])


def is_isomorphism_onto(A: IntMatrix, M: AffineMonoid, N: AffineMonoid) -> bool:
    """True when ``A`` maps ``M`` isomorphically onto ``N``."""
    if A.shape != (N.rank, M.rank):
        return False
    B = _basis_matrix(M.lattice, M.rank)
    if rational_rank((A @ B).columns()) != len(M.lattice):
        return False
    return image_monoid(A, M) == N


@dataclass(frozen=True)
class NeatnessReport:
    gp_injective: bool
    coker_rank: int
    coker_torsion: tuple
    is_local: bool


def neatness_report(h: MonoidHom) -> NeatnessReport:
    rank, torsion = h.coker
    return NeatnessReport(h.gp_injective, rank, tuple(torsion), h.is_local)


def _require_saturated(h: MonoidHom):
    if not (h.source.is_saturated and h.target.is_saturated):
        raise MorphismError("source and target must be saturated")


def exact_closure(h: MonoidHom) -> AffineMonoid:
    """``{q in gp(Q) : h(q) in P}`` for saturated ``P``."""
    pre = h.target.cone.preimage(h.matrix)
    return saturated_monoid(h.source.rank, pre, h.source.lattice)


def is_exact_hom(h: MonoidHom) -> bool:
    _require_saturated(h)
    return exact_closure(h) == h.source


def preimage_face(h: MonoidHom, F: AffineMonoid) -> AffineMonoid:
    """The face ``h^{-1}(F)`` of the source."""
    return AffineMonoid(h.source.rank, tuple(g for g in h.source.gens if F.cone.contains(h(g))))


def face_localization(h: MonoidHom, F: AffineMonoid) -> MonoidHom:
    """Sharpened localization ``(Q_{h^-1 F})^sharp -> (P_F)^sharp``."""
    G = preimage_face(h, F)
    QG = localize(h.source, G)
    PF = localize(h.target, F)
    Qs, pQ = sharpen(QG)
    Ps, pP = sharpen(PF)
    A = pP @ h.matrix @ right_inverse(pQ)
    return MonoidHom(Qs, Ps, A)


@dataclass(frozen=True)
class PointwiseReport:
    """Per-face verdicts; ``holds`` is ``None`` when some face is undecided."""

    holds: bool | None
    table: tuple = ()


def is_exact_morphism(h: MonoidHom) -> PointwiseReport:
    _require_saturated(h)
    rows = []
    for F in faces(h.target):
        rows.append((F, is_exact_hom(face_localization(h, F))))
    return PointwiseReport(all(ok for _, ok in rows), tuple(rows))


# ---------------------------------------------------------------------------
# push-outs

@dataclass(frozen=True)
class Pushout:
    monoid: AffineMonoid
    inj_P: IntMatrix
    inj_Q2: IntMatrix
    torsion: tuple

    def hom_from_Q2(self, Q2: AffineMonoid) -> MonoidHom:
        return MonoidHom(Q2, self.monoid, self.inj_Q2)

    def hom_from_P(self, P: AffineMonoid) -> MonoidHom:
        return MonoidHom(P, self.monoid, self.inj_P)


def pushout_fs(h: MonoidHom, g: MonoidHom) -> Pushout:
    """fs push-out of ``P <- Q -> Q2`` for ``h: Q -> P`` and ``g: Q -> Q2``."""
    if h.source != g.source:
        raise MorphismError("push-out legs must share their source")
    Q, P, Q2 = h.source, h.target, g.target
    BQ = _basis_matrix(Q.lattice, Q.rank)
    rel = (h.matrix @ BQ).vstack(IntMatrix.from_rows([neg(r) for r in (g.matrix @ BQ).entries], BQ.cols))
    D, U, _ = snf(rel)
    r = len(diagonal(D))
    N = rel.rows
    pi = U.select_rows(list(range(r, N)))
    inj_P = pi.select_columns(list(range(P.rank)))
    inj_Q2 = pi.select_columns(list(range(P.rank, N)))
    images = [inj_P.apply(x) for x in P.gens] + [inj_Q2.apply(x) for x in Q2.gens]
    f = N - r
    monoid = saturated_monoid(f, Cone.from_generators(f, images), hnf_basis(images, f))
    Xg = g.gp_matrix
    grel = h.gp_matrix.vstack(IntMatrix.from_rows([neg(x) for x in Xg.entries], Xg.cols))
    _, torsion = coker_invariants(grel)
    return Pushout(monoid, inj_P, inj_Q2, tuple(torsion))


def inclusion(Q: AffineMonoid, P: AffineMonoid) -> MonoidHom:
    return hom_new(Q, P, IntMatrix.identity(Q.rank))


# ---------------------------------------------------------------------------
# integrality

@dataclass(frozen=True)
class Integral:
    certificate: str  # "FreeModule", "MiracleFlatness" or "Identity"
    details: tuple = ()
    sharpened: bool = False


@dataclass(frozen=True)
class NotIntegral:
    witness: tuple | None
    reason: str = ""
    sharpened: bool = False


@dataclass(frozen=True)
class UnknownUpTo:
    bound: int
    sharpened: bool = False


@dataclass(frozen=True)
class NoViolationUpTo:
    bound: int


@dataclass(frozen=True)
class Violated:
    witness: tuple


def _elements(M: AffineMonoid, bound: int) -> dict:
    """Elements expressible with generator-coefficient sum at most ``bound`` -> least degree."""
    level = {zero(M.rank): 0}
    frontier = [zero(M.rank)]
    for d in range(1, bound + 1):
        nxt = []
        for x in frontier:
            for g in M.gens:
                y = add(x, g)
                if y not in level:
                    level[y] = d
                    nxt.append(y)
        frontier = nxt
    return level


def _order_key(x, deg):
    return (deg, tuple(-c for c in x))


class _KatoChecker:
    """Memoized test of the four-element condition.

    Given ``h(a1) + b1 = h(a2) + b2``, a triple exists iff some ``a3`` with
    ``b1 - h(a3)`` in ``P`` also has ``a3 - (a2 - a1)`` in ``Q``; ``b2`` then
    follows. So the answer depends only on ``(a2 - a1, b1)``.
    """

    def __init__(self, h: MonoidHom):
        self.h = h
        self._below = {}
        self._memo = {}
        self._inQ = {}
        self._hval = {}
        self._profiles = {}
        self._F = h.source.cone.ineqs if h.source.is_saturated else None
        for g in h.source.gens:
            if not any(h(g)):
                raise MorphismError("bounded search needs h(g) != 0 on every generator (local hom)")

    def _h(self, a):
        v = self._hval.get(a)
        if v is None:
            v = self._hval[a] = self.h(a)
        return v

    def in_Q(self, a):
        v = self._inQ.get(a)
        if v is None:
            v = self._inQ[a] = a in self.h.source
        return v

    def below(self, b1):
        """All ``a`` in ``Q`` with ``b1 - h(a)`` in ``P``."""
        if b1 in self._below:
            return self._below[b1]
        Q, P = self.h.source, self.h.target
        start = zero(Q.rank)
        seen = {start}
        todo = [start]
        while todo:
            a = todo.pop()
            for g in Q.gens:
                a2 = add(a, g)
                if a2 not in seen and sub(b1, self._h(a2)) in P:
                    seen.add(a2)
                    todo.append(a2)
        out = sorted(seen)
        self._below[b1] = out
        return out

    def _profile(self, b1):
        """Pareto-maximal facet values ``F a3`` over ``below(b1)`` (saturated ``Q``)."""
        p = self._profiles.get(b1)
        if p is None:
            vals = {tuple(dot(f, a) for f in self._F) for a in self.below(b1)}
            p = [v for v in vals
                 if not any(w != v and all(x >= y for x, y in zip(w, v)) for w in vals)]
            self._profiles[b1] = p
        return p

    def holds(self, a1, a2, b1, b2=None) -> bool:
        d = sub(a2, a1)
        key = (d, b1)
        r = self._memo.get(key)
        if r is None:
            if self.in_Q(neg(d)):
                r = True
            elif self._F is not None:
                # Q saturated: a3 - d in Q iff F a3 >= F d (a3 - d is in gp(Q))
                fd = tuple(dot(f, d) for f in self._F)
                r = any(all(x >= y for x, y in zip(v, fd)) for v in self._profile(b1))
            else:
                r = any(self.in_Q(sub(a3, d)) for a3 in self.below(b1))
            self._memo[key] = r
        return r


def kato_witness_replays(h: MonoidHom, witness) -> bool:
    """True when ``witness`` satisfies the hypothesis and no ``(a3, a4, b)`` exists."""
    a1, a2, b1, b2 = (vec(x) for x in witness)
    Q, P = h.source, h.target
    if not (a1 in Q and a2 in Q and b1 in P and b2 in P):
        return False
    if add(h(a1), b1) != add(h(a2), b2):
        return False
    return not _KatoChecker(h).holds(a1, a2, b1, b2)


def kato_bounded(h: MonoidHom, bound: int = DEFAULT_BOUND):
    """Exhaustive check of Kato's four-element criterion on elements of degree <= bound."""
    Q, P = h.source, h.target
    if not (Q.is_sharp and P.is_sharp):
        raise MorphismError("kato_bounded needs sharp source and target; sharpen first")
    checker = _KatoChecker(h)
    Qel = _elements(Q, bound)
    Pel = _elements(P, bound)
    Qs = sorted(Qel, key=lambda x: _order_key(x, Qel[x]))
    Ps = sorted(Pel, key=lambda x: _order_key(x, Pel[x]))
    groups = defaultdict(list)
    for i, a in enumerate(Qs):
        ha = checker._h(a)
        for j, b in enumerate(Ps):
            groups[add(ha, b)].append((i, j))
    # diff[i1][i2] numbers a2 - a1; pairs with a1 - a2 or a2 - a1 in Q always
    # satisfy the condition (take a3 = 0 or a3 = a2 - a1) and are marked -1
    ids = {}
    diff = []
    for a1 in Qs:
        row = []
        for a2 in Qs:
            d = sub(a2, a1)
            if d not in ids:
                ids[d] = -1 if checker.in_Q(d) or checker.in_Q(neg(d)) else len(ids)
            row.append(ids[d])
        diff.append(row)
    known = {}
    worst = None
    for members in groups.values():
        if len(members) < 2:
            continue
        for i1, j1 in members:
            row = diff[i1]
            for i2, j2 in members:
                did = row[i2]
                if did < 0:
                    continue
                key = (did, j1)
                r = known.get(key)
                if r is None:
                    r = known[key] = checker.holds(Qs[i1], Qs[i2], Ps[j1])
                if not r:
                    k = (i1, i2, j1, j2)
                    if worst is None or k < worst:
                        worst = k
    if worst is not None:
        i1, i2, j1, j2 = worst
        return Violated((Qs[i1], Qs[i2], Ps[j1], Ps[j2]))
    return NoViolationUpTo(bound)


def _split_difference(Q: AffineMonoid, q):
    """Write ``q`` in ``gp(Q)`` as ``a2 - a1`` with ``a1, a2`` in ``Q``."""
    G = IntMatrix.from_columns(Q.gens, Q.rank)
    sol = solve_linear(G, q)
    if sol is None:
        raise MonoidError(f"{q} is not in gp(Q)")
    c = sol[0]
    a2, a1 = zero(Q.rank), zero(Q.rank)
    for ci, g in zip(c, Q.gens):
        if ci > 0:
            a2 = add(a2, tuple(ci * x for x in g))
        elif ci < 0:
            a1 = add(a1, tuple(-ci * x for x in g))
    return a1, a2


def sharpened(h: MonoidHom) -> MonoidHom:
    """Induced hom between sharp quotients of a local hom."""
    if not h.is_local:
        raise MorphismError("sharpening a non-local hom")
    Qs, pQ = sharpen(h.source)
    Ps, pP = sharpen(h.target)
    return MonoidHom(Qs, Ps, pP @ h.matrix @ right_inverse(pQ))


def _is_trivial_iso(h: MonoidHom) -> bool:
    return is_isomorphism_onto(h.matrix, h.source, h.target)


def _check_exact_strategy(h: MonoidHom):
    Q, P = h.source, h.target
    if not (Q.is_sharp and P.is_sharp):
        raise StrategyInapplicable("source and target must be sharp")
    if not (Q.is_saturated and P.is_saturated):
        raise StrategyInapplicable("source and target must be saturated")
    if not h.gp_injective:
        raise StrategyInapplicable("hom is not injective on gp")
    if not h.is_local:
        raise StrategyInapplicable("hom is not local")


def _free_module(h: MonoidHom):
    _check_exact_strategy(h)
    if h.coker[0] != 0:
        raise StrategyInapplicable("gp-cokernel is infinite")
    Q, P = h.source, h.target
    BQ = _basis_matrix(Q.lattice, Q.rank)
    BP = _basis_matrix(P.lattice, P.rank)
    X = h.gp_matrix
    kP = X.rows
    Qc = [to_coordinates(BQ, g) for g in Q.gens]
    Pc = [to_coordinates(BP, g) for g in P.gens]
    images = [X.apply(g) for g in Qc]
    Pcone = Cone.from_generators(kP, Pc)
    Hcone = Cone.from_generators(kP, images)
    H = hnf_basis(X.columns(), kP)
    Qcone_c = Cone.from_generators(len(Qc[0]) if Qc else 0, Qc)

    def to_ambient_Q(q):
        return BQ.apply(q)

    def in_hQ(x):
        sol = solve_linear(X, x)
        return sol is not None and Qcone_c.contains(sol[0])

    def witness(y1, y2):
        q = solve_linear(X, sub(y1, y2))[0]  # y1 - y2 = h(q) = h(a2 - a1)
        a1, a2 = _split_difference(Q, to_ambient_Q(q))
        return (a1, a2, BP.apply(y1), BP.apply(y2))

    if Hcone != Pcone:
        m = 1
        for d in h.coker[1]:
            m *= d
        p = next(x for x in Pc if not Hcone.contains(x))
        x = tuple(m * c for c in p)
        return NotIntegral(witness(x, zero(kP)), "image cone is smaller than the target cone")
    # generators of h(Q) on the extreme rays of the common cone
    on_ray = {}
    for v in images:
        if any(v):
            r = primitive(v)
            if r not in on_ray or sum(map(abs, v)) < sum(map(abs, on_ray[r])):
                on_ray[r] = v
    cands = set()
    for simplex in triangulate(Pcone):
        cands.update(parallelepiped_points([on_ray[r] for r in simplex]))
    cosets = defaultdict(list)
    for x in sorted(cands):
        cosets[reduce_mod(x, H)].append(x)
    index = 1
    for d in h.coker[1]:
        index *= d
    if len(cosets) != index:
        raise AssertionError("coset enumeration missed a class")
    gens_per_coset = []
    for rep in sorted(cosets):
        xs = cosets[rep]
        minimal = [x for x in xs if not any(y != x and in_hQ(sub(x, y)) for y in xs)]
        if len(minimal) > 1:
            return NotIntegral(witness(minimal[0], minimal[1]), "coset needs two generators")
        gens_per_coset.append(BP.apply(minimal[0]))
    return Integral("FreeModule", tuple(sorted(gens_per_coset)))


def _miracle(h: MonoidHom, bound: int):
    _check_exact_strategy(h)
    if not h.source.is_free:
        raise StrategyInapplicable("source is not free")
    Q, P = h.source, h.target
    BQ = _basis_matrix(Q.lattice, Q.rank)
    BP = _basis_matrix(P.lattice, P.rank)
    X = h.gp_matrix
    sigma_Q = Cone.from_generators(X.cols, [to_coordinates(BQ, g) for g in Q.gens]).dual()
    sigma_P = Cone.from_generators(X.rows, [to_coordinates(BP, g) for g in P.gens]).dual()
    phi = X.T
    ok, fiber = cone_map_onto_faces(phi, sigma_P, sigma_Q)
    if ok:
        return Integral("MiracleFlatness", (("fiber_dim", fiber),))
    res = kato_bounded(h, bound)
    w = res.witness if isinstance(res, Violated) else None
    return NotIntegral(w, "a face of the dual target cone does not map onto a face")


def cone_map_onto_faces(phi: IntMatrix, src: Cone, dst: Cone):
    """Whether every face of ``src`` maps onto a face of ``dst``; also ``dim src - dim phi(src)``."""
    dst_faces = set(cone_faces(dst))
    for tau in cone_faces(src):
        if tau.image(phi) not in dst_faces:
            return False, None
    return True, src.dim - src.image(phi).dim


STRATEGIES = ("auto", "free_module", "miracle", "bounded")


def is_integral(h: MonoidHom, strategy: str = "auto", bound: int = DEFAULT_BOUND):
    """Integrality verdict for ``h``.

    ``free_module`` and ``miracle`` are exact and raise
    :class:`StrategyInapplicable` outside their preconditions; ``bounded``
    refutes up to ``bound``; ``auto`` picks the first applicable one.  Non-sharp
    local homs are replaced by their sharpening first (the verdict records it).
    """
    if strategy not in STRATEGIES:
        raise MorphismError(f"unknown strategy {strategy!r}")
    was_sharpened = False
    if not (h.source.is_sharp and h.target.is_sharp):
        h = sharpened(h)
        was_sharpened = True

    def mark(v):
        if was_sharpened:
            return type(v)(**{**v.__dict__, "sharpened": True})
        return v

    if strategy == "free_module":
        return mark(_free_module(h))
    if strategy == "miracle":
        return mark(_miracle(h, bound))
    if strategy == "bounded":
        res = kato_bounded(h, bound)
        return mark(NotIntegral(res.witness, "kato violation") if isinstance(res, Violated) else UnknownUpTo(bound))
    if _is_trivial_iso(h):
        return mark(Integral("Identity"))
    for fn in (_free_module, lambda x: _miracle(x, bound)):
        try:
            return mark(fn(h))
        except StrategyInapplicable:
            continue
    res = kato_bounded(h, bound)
    return mark(NotIntegral(res.witness, "kato violation") if isinstance(res, Violated) else UnknownUpTo(bound))


def is_integral_morphism(h: MonoidHom, bound: int = DEFAULT_BOUND) -> PointwiseReport:
    _require_saturated(h)
    rows = []
    for F in faces(h.target):
        rows.append((F, is_integral(face_localization(h, F), "auto", bound)))
    verdicts = [v for _, v in rows]
    if any(isinstance(v, NotIntegral) for v in verdicts):
        holds = False
    elif any(isinstance(v, UnknownUpTo) for v in verdicts):
        holds = None
    else:
        holds = True
    return PointwiseReport(holds, tuple(rows))
