"""Fans, integral piecewise-linear functions and their subdivisions.

Convention: ord-functions are pointwise minima of their linear pieces
(``kind="min"``); the projective support function is a pointwise maximum
(``kind="max"``), normalized to be nonnegative.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .lattice import (
    Cone,
    IntMatrix,
    add,
    cone_faces,
    dot,
    neg,
    parallelepiped_points,
    primitive,
    primitive_and_extend,
    rational_solve,
    inverse_unimodular,
    reduce_mod,
    saturation_basis,
    sub,
    vec,
    zero,
)
from .monoid import AffineMonoid, MonoidIdeal, ideal_normalize, saturated_monoid


class FanError(ValueError):
    """Invalid fan or piecewise-linear data."""


def _std(n):
    return [tuple(int(i == j) for j in range(n)) for i in range(n)]


@dataclass(frozen=True)
class Fan:
    """A fan given by its maximal cones in canonical (sorted) order."""

    ambient_rank: int
    cones: tuple

    @classmethod
    def new(cls, n: int, cones) -> "Fan":
        cones = list(dict.fromkeys(cones))
        keep = [c for c in cones
                if not any(d != c and d.contains_cone(c) for d in cones)]
        return cls(n, tuple(sorted(keep, key=lambda c: (c.rays, c.ineqs))))

    @cached_property
    def faces(self) -> frozenset:
        out = set()
        for c in self.cones:
            out.update(cone_faces(c))
        return frozenset(out)

    @cached_property
    def rays(self) -> tuple:
        """Primitive generators of the one-dimensional cones."""
        out = set()
        for c in self.cones:
            if c.is_pointed:
                out.update(c.extreme_rays)
        return tuple(sorted(out))

    def containing(self, x) -> list:
        return [c for c in self.cones if c.contains(x)]

    def __repr__(self):
        return f"Fan({[list(c.extreme_rays) for c in self.cones]})"


def fan_from_cone(c: Cone) -> Fan:
    return Fan.new(c.ambient_rank, [c])


def fan_validate(f: Fan) -> bool:
    """Exact fan condition: any two cones meet in a common face."""
    face_sets = [set(cone_faces(c)) for c in f.cones]
    for i, j in itertools.combinations(range(len(f.cones)), 2):
        meet = f.cones[i].intersect(f.cones[j])
        if meet not in face_sets[i] or meet not in face_sets[j]:
            return False
    return True


def _on_boundary(face: Cone, sigma: Cone) -> bool:
    return any(all(dot(g, r) == 0 for r in face.rays) for g in sigma.facets)


def covers(sigma: Cone, cells) -> bool:
    """Whether cells with pairwise disjoint interiors cover ``sigma``.

    Cells of full dimension inside ``sigma`` cover it exactly when every
    facet of a cell off the boundary of ``sigma`` is shared by two cells.
    """
    d = sigma.dim
    cells = [c for c in cells if c.dim == d and sigma.contains_cone(c)]
    if not cells:
        return False
    if d == len(sigma.lineality):
        return True
    count = Counter()
    for c in cells:
        for g in c.facets:
            count[c.face(g)] += 1
    for F, k in count.items():
        if _on_boundary(F, sigma):
            if k != 1:
                return False
        elif k != 2:
            return False
    return True


def same_support(f: Fan, g: Fan) -> bool:
    """``|f| = |g|`` for a fan ``g`` refining ``f`` (or vice versa)."""
    fine, coarse = (g, f) if len(g.cones) >= len(f.cones) else (f, g)
    for c in fine.cones:
        if not any(s.contains_cone(c) for s in coarse.cones):
            return False
    return all(covers(s, [c for c in fine.cones if s.contains_cone(c)]) for s in coarse.cones)


def is_refinement(fine: Fan, coarse: Fan) -> bool:
    return all(any(s.contains_cone(c) for s in coarse.cones) for c in fine.cones) and same_support(fine, coarse)


# ---------------------------------------------------------------------------
# piecewise-linear functions

def _canon_functional(l, cone: Cone):
    return reduce_mod(vec(l), cone.equations) if cone.equations else vec(l)


def _domains(sigma: Cone, pieces, kind):
    """Maximal linearity domains of ``min``/``max`` of ``pieces`` on ``sigma``."""
    out = {}
    for li in pieces:
        if kind == "min":
            ineqs = [sub(lj, li) for lj in pieces]
        else:
            ineqs = [sub(li, lj) for lj in pieces]
        cell = sigma.intersect(Cone.from_inequalities(sigma.ambient_rank, [x for x in ineqs if any(x)]))
        if cell.dim == sigma.dim:
            out.setdefault(cell, _canon_functional(li, cell))
    return out


@dataclass(frozen=True)
class PLFunction:
    """Continuous PL function: one integer functional per maximal cone of ``fan``.

    ``pieces`` keeps the linear functions whose ``kind`` (``"min"``/``"max"``)
    produces it, which is how subdivisions and pullbacks are computed.
    """

    fan: Fan
    linear_data: tuple
    kind: str
    pieces: tuple

    @classmethod
    def from_pieces(cls, domain, pieces, kind: str = "min") -> "PLFunction":
        if kind not in ("min", "max"):
            raise FanError(f"unknown kind {kind!r}")
        if isinstance(domain, Cone):
            domain = fan_from_cone(domain)
        pieces = [vec(p) for p in pieces]
        for p in pieces:
            if any(not isinstance(c, int) for c in p):
                raise FanError("non-integral linear piece")
        if not pieces:
            raise FanError("a PL function needs at least one piece")
        pieces = sorted(set(pieces))
        cells = {}
        for sigma in domain.cones:
            cells.update(_domains(sigma, pieces, kind))
        fan = Fan.new(domain.ambient_rank, cells)
        return cls(fan, tuple(cells[c] for c in fan.cones), kind, tuple(pieces))

    def __call__(self, x):
        x = vec(x)
        for c, l in zip(self.fan.cones, self.linear_data):
            if c.contains(x):
                return dot(l, x)
        raise FanError(f"{x} lies outside the support")

    def functional_on(self, cone: Cone):
        for c, l in zip(self.fan.cones, self.linear_data):
            if c.contains_cone(cone):
                return l
        raise FanError("cone is not inside a linearity domain")

    def is_linear(self) -> bool:
        return len(self.fan.cones) <= 1

    def is_min_type(self) -> bool:
        """``s`` equals the minimum of its linear data over its support."""
        for c, l in zip(self.fan.cones, self.linear_data):
            for l2 in self.linear_data:
                if any(dot(sub(l2, l), r) < 0 for r in c.rays):
                    return False
        return True

    def is_max_type(self) -> bool:
        for c, l in zip(self.fan.cones, self.linear_data):
            for l2 in self.linear_data:
                if any(dot(sub(l, l2), r) < 0 for r in c.rays):
                    return False
        return True

    def negate(self) -> "PLFunction":
        kind = "max" if self.kind == "min" else "min"
        return PLFunction(self.fan, tuple(neg(l) for l in self.linear_data), kind,
                          tuple(sorted(neg(p) for p in self.pieces)))

    def shift(self, m) -> "PLFunction":
        """``s + <m, .>``."""
        m = vec(m)
        return PLFunction(self.fan, tuple(_canon_functional(add(l, m), c) for c, l in zip(self.fan.cones, self.linear_data)),
                          self.kind, tuple(sorted(add(p, m) for p in self.pieces)))

    def restrict(self, domain) -> "PLFunction":
        if isinstance(domain, Cone):
            domain = fan_from_cone(domain)
        check_defined(self, domain)
        return PLFunction.from_pieces(domain, self.pieces, self.kind)

    def __repr__(self):
        return f"PLFunction({self.kind}, {[list(p) for p in self.pieces]} on {self.fan!r})"


def pl_sum(functions, domain) -> PLFunction:
    """Sum of PL functions of the same kind, as a function on ``domain``."""
    functions = list(functions)
    kinds = {s.kind for s in functions}
    if len(kinds) != 1:
        raise FanError("can only add PL functions of one kind")
    pieces = {zero(domain.ambient_rank)}
    for s in functions:
        pieces = {add(p, q) for p in pieces for q in s.pieces}
    return PLFunction.from_pieces(domain, pieces, kinds.pop())


def zero_pl(domain) -> PLFunction:
    return PLFunction.from_pieces(domain, [zero(domain.ambient_rank)], "min")


def check_defined(s: PLFunction, f: Fan):
    """Raise unless ``|f|`` lies inside the support of ``s``."""
    for sigma in f.cones:
        if not covers(sigma, [sigma.intersect(c) for c in s.fan.cones]):
            raise FanError("PL function is not defined on the whole support")


def pl_from_ideal(Q: AffineMonoid, K: MonoidIdeal) -> PLFunction:
    """``ord_K(n) = min_k <k, n>`` on the dual cone of ``Q``."""
    if K.is_empty:
        raise FanError("ord of the empty ideal is undefined")
    if not (Q.is_sharp and Q.is_saturated):
        raise FanError("pl_from_ideal needs a sharp saturated monoid")
    return PLFunction.from_pieces(Q.cone.dual(), K.gens, "min")


def _vertices(ineqs, n):
    """Vertices of ``{x : <a, x> >= c}`` given as pairs ``(a, c)`` (pointed case)."""
    verts = set()
    for rows in itertools.combinations(ineqs, n):
        sol = rational_solve([a for a, _ in rows], [c for _, c in rows])
        if sol is None:
            continue
        if all(sum(Fraction(x) * y for x, y in zip(a, sol)) >= c for a, c in ineqs):
            verts.add(tuple(sol))
    return verts


def ideal_from_pl(Q: AffineMonoid, s: PLFunction) -> MonoidIdeal:
    """``K = {q in Q : <q, .> >= s on the dual cone of Q}``, by minimal generators."""
    n = Q.rank
    if not (Q.is_sharp and Q.is_saturated and tuple(Q.lattice) == tuple(_std(n))):
        raise FanError("ideal_from_pl needs a sharp saturated monoid with gp = Z^n")
    if s.kind != "min" or not s.is_min_type():
        raise FanError("non-convex PL function (expected a minimum of linear pieces)")
    sigma = Q.cone.dual()
    s = s.restrict(sigma)
    rays = set(sigma.rays)
    for c in s.fan.cones:
        rays.update(c.rays)
    ineqs = [(r, s(r)) for r in sorted(rays)]
    verts = _vertices(ineqs, n)
    if not verts:
        raise FanError("empty ideal")
    lo, hi = [], []
    for i in range(n):
        vals = [v[i] for v in verts]
        neg_part = sum(min(0, g[i]) for g in Q.gens)
        pos_part = sum(max(0, g[i]) for g in Q.gens)
        lo.append(int(min(vals) // 1) + neg_part)
        hi.append(-int(-max(vals) // 1) + pos_part)
    box = itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi)))
    members = [q for q in box if all(dot(q, r) >= c for r, c in ineqs)]
    return ideal_normalize(Q, members)


# ---------------------------------------------------------------------------
# subdivisions

def subdivide_by_pl(f: Fan, s: PLFunction) -> Fan:
    """Refine ``f`` by the maximal linearity domains of ``s``."""
    check_defined(s, f)
    return PLFunction.from_pieces(f, s.pieces, s.kind).fan


def pullback_pl(phi: IntMatrix, s: PLFunction, src: Fan) -> PLFunction:
    """``s ∘ phi`` on the fan ``src`` (``phi`` maps the source lattice to the target)."""
    for sigma in src.cones:
        img = sigma.image(phi)
        if not covers(img, [img.intersect(c) for c in s.fan.cones]):
            raise FanError("phi maps the fan outside the support of s")
    return PLFunction.from_pieces(src, [phi.T.apply(p) for p in s.pieces], s.kind)


def common_refinement(f: Fan, g: Fan) -> Fan:
    cells = [a.intersect(b) for a in f.cones for b in g.cones]
    return Fan.new(f.ambient_rank, cells)


def preimage_fan(phi: IntMatrix, f: Fan, domain: Fan) -> Fan:
    """Cones ``sigma ∩ phi^{-1}(tau)`` for ``sigma`` in ``domain``, ``tau`` in ``f``."""
    cells = [s.intersect(t.preimage(phi)) for s in domain.cones for t in f.cones]
    return Fan.new(domain.ambient_rank, cells)


def projective_support(n1) -> PLFunction:
    """``s(n) = max(0, -x_1, ..., -x_r)`` in a basis completing ``n1``."""
    n1 = vec(n1)
    if not any(n1):
        raise FanError("projective_support of the zero vector")
    if primitive(n1) != n1:
        raise FanError("n1 must be primitive")
    _, B = primitive_and_extend(n1)
    Binv = inverse_unimodular(B)
    r = len(n1)
    pieces = [zero(r)] + [neg(Binv.row(i)) for i in range(r)]
    return PLFunction.from_pieces(Cone.full_space(r), pieces, "max")


# ---------------------------------------------------------------------------
# smoothness

def _saturation_coords(rays, n):
    S = saturation_basis(rays, n)
    B = IntMatrix.from_columns(S, n)
    coords = [rational_solve(B.entries, r) for r in rays]
    return B, [tuple(int(x) for x in c) for c in coords]


def cone_multiplicity(c: Cone) -> int:
    """Index of the ray lattice in its saturation (simplicial pointed cones)."""
    rays = list(c.extreme_rays)
    if not rays:
        return 1
    _, coords = _saturation_coords(rays, c.ambient_rank)
    return abs(IntMatrix.from_columns(coords, len(coords)).det())


def is_smooth_cone(c: Cone) -> bool:
    if not c.is_pointed or len(c.extreme_rays) != c.dim:
        return False
    return cone_multiplicity(c) == 1


def is_smooth(f: Fan) -> bool:
    return all(is_smooth_cone(c) for c in f.cones)


def star_subdivide(f: Fan, p) -> Fan:
    """Star subdivision of ``f`` at the lattice point ``p``."""
    p = vec(p)
    if not any(p):
        raise FanError("cannot subdivide at the origin")
    cells = []
    for tau in f.cones:
        if not tau.contains(p):
            cells.append(tau)
            continue
        if not tau.is_pointed:
            raise FanError("star subdivision needs pointed cones")
        for g in tau.facets:
            F = tau.face(g)
            if not F.contains(p):
                cells.append(Cone.from_generators(f.ambient_rank, list(F.rays) + [p]))
    return Fan.new(f.ambient_rank, cells)


def make_simplicial(f: Fan) -> Fan:
    """Pull the rays of ``f`` in order until every cone is simplicial."""
    for r in f.rays:
        if any(len(c.extreme_rays) != c.dim for c in f.cones if c.contains(r)):
            f = star_subdivide(f, r)
    if any(len(c.extreme_rays) != c.dim for c in f.cones):
        raise AssertionError("pulling refinement left a non-simplicial cone")
    return f


def _subdivision_point(c: Cone):
    rays = list(c.extreme_rays)
    B, coords = _saturation_coords(rays, c.ambient_rank)
    best = None
    for x in parallelepiped_points(coords):
        if not any(x):
            continue
        lam = rational_solve(IntMatrix.from_columns(coords, len(coords)).entries, x)
        p = B.apply(x)
        key = (sum(lam), p)
        if best is None or key < best:
            best = key
    return best[1]


def resolve_smooth(f: Fan) -> Fan:
    """Smooth refinement by star subdivisions, keeping the support."""
    if any(not c.is_pointed for c in f.cones):
        raise FanError("resolve_smooth needs pointed cones")
    f = make_simplicial(f)
    while True:
        bad = next((c for c in f.cones if not is_smooth_cone(c)), None)
        if bad is None:
            return f
        f = star_subdivide(f, _subdivision_point(bad))


@dataclass(frozen=True)
class OntoReport:
    onto: bool
    constant_fiber: bool
    fiber_dims: tuple


def cones_map_onto(phi: IntMatrix, src: Fan, dst: Fan) -> OntoReport:
    """Whether every cone of ``src`` maps onto a cone of ``dst``."""
    onto = all(tau.image(phi) in dst.faces for tau in src.faces)
    if not onto:
        for sigma in src.cones:
            img = sigma.image(phi)
            if not covers(img, [img.intersect(t) for t in dst.cones]):
                raise FanError("image escapes the support of the target fan")
    dims = tuple(sigma.dim - sigma.image(phi).dim for sigma in src.cones)
    return OntoReport(onto, len(set(dims)) <= 1, dims)


def chart_of_cone(tau: Cone, lattice=None) -> AffineMonoid:
    """The monoid ``tau^dual ∩ M``."""
    n = tau.ambient_rank
    return saturated_monoid(n, tau.dual(), _std(n) if lattice is None else lattice)
