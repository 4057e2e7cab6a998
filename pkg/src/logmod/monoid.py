"""Affine monoids inside integer lattices, and their ideals."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache, reduce

from .lattice import (
    Cone,
    IntMatrix,
    add,
    cone_faces,
    dot,
    hilbert_basis,
    hnf_basis,
    in_lattice,
    inverse_unimodular,
    neg,
    reduce_mod,
    snf,
    solve_linear,
    sub,
    vec,
    zero,
)


class MonoidError(ValueError):
    """Invalid monoid, face or ideal data."""


def _pm(basis):
    return [tuple(b) for b in basis] + [neg(b) for b in basis]


def _basis_matrix(basis, n) -> IntMatrix:
    return IntMatrix.from_columns(basis, n) if basis else IntMatrix.zeros(n, 0)


def quotient_projection(sublattice, n: int):
    """Surjection ``Z^n -> Z^(n-l)`` whose kernel is a saturated sublattice, with a section.

    Returns ``(proj, section)`` with ``proj @ section == identity``.
    """
    l = len(sublattice)
    if l == 0:
        return IntMatrix.identity(n), IntMatrix.identity(n)
    D, U, _ = snf(_basis_matrix(sublattice, n))
    if any(D[i, i] != 1 for i in range(l)):
        raise MonoidError("sublattice is not saturated")
    Uinv = inverse_unimodular(U)
    proj = U.select_rows(list(range(l, n)))
    section = Uinv.select_columns(list(range(l, n)))
    return proj, section


def right_inverse(P: IntMatrix) -> IntMatrix:
    """Integer right inverse of a surjective integer matrix."""
    D, U, V = snf(P)
    r = P.rows
    if any(D[i, i] != 1 for i in range(r)):
        raise MonoidError("matrix is not surjective onto the lattice")
    return V.select_columns(list(range(r))) @ U


@dataclass(frozen=True)
class AffineMonoid:
    """Finitely generated submonoid of ``Z^rank``.

    Build instances with :func:`monoid_new` (or the operations of this module)
    so that ``gens`` is canonical: saturated monoids carry ``±`` the HNF basis of
    their unit group plus reduced lifts of the Hilbert basis of the sharp
    quotient; other monoids carry a generating set with redundant elements
    removed.  Equality of canonical monoids is equality of the dataclass.
    """

    rank: int
    gens: tuple

    @cached_property
    def cone(self) -> Cone:
        return Cone.from_generators(self.rank, self.gens)

    @cached_property
    def lattice(self) -> tuple:
        """HNF basis of the group ``gp(M)``."""
        return hnf_basis(self.gens, self.rank)

    @property
    def gp_rank(self) -> int:
        return len(self.lattice)

    @cached_property
    def units(self) -> tuple:
        """HNF basis of the unit group."""
        lin = self.cone.lineality
        return hnf_basis([g for g in self.gens if all(dot(e, g) == 0 for e in _orth(lin, self.rank))],
                         self.rank) if lin else ()

    @property
    def is_sharp(self) -> bool:
        return self.cone.is_pointed

    @property
    def is_fine(self) -> bool:
        return True

    @cached_property
    def is_saturated(self) -> bool:
        sat = saturated_monoid(self.rank, self.cone, self.lattice)
        return all(g in self for g in sat.gens)

    @property
    def is_free(self) -> bool:
        """True when the monoid is isomorphic to ``N^r``."""
        return self.is_sharp and len(self.gens) == self.gp_rank

    @property
    def is_full(self) -> bool:
        return self.gp_rank == self.rank

    @cached_property
    def _membership(self):
        return _membership_oracle(self.rank, self.gens)

    def __contains__(self, x) -> bool:
        x = vec(x)
        if len(x) != self.rank:
            return False
        return self._membership(x)

    def coordinates(self):
        """The same monoid written in the coordinates of an HNF basis of ``gp(M)``.

        Returns ``(monoid_in_Z^k, B)`` with ``B`` the ``rank x k`` basis matrix.
        """
        B = _basis_matrix(self.lattice, self.rank)
        gens = [to_coordinates(B, g) for g in self.gens]
        return monoid_new(len(self.lattice), gens), B

    def __repr__(self):
        return f"AffineMonoid(rank={self.rank}, gens={list(self.gens)})"


def _orth(basis, n):
    from .lattice import orthogonal_lattice
    return orthogonal_lattice(basis, n)


def to_coordinates(B: IntMatrix, x) -> tuple:
    sol = solve_linear(B, x)
    if sol is None:
        raise MonoidError(f"{x} is not in the lattice")
    return sol[0]


def _membership_oracle(n, gens):
    """Exact membership test for the monoid generated by ``gens``."""
    gens = [vec(g) for g in gens]
    cone = Cone.from_generators(n, gens)
    lattice = hnf_basis(gens, n)
    lin = cone.lineality
    if lin:
        orth = _orth(lin, n)
        in_lin = [g for g in gens if all(dot(e, g) == 0 for e in orth)]
    else:
        in_lin = []
    units = hnf_basis(in_lin, n)
    rest = [g for g in gens if g not in set(in_lin)]
    grading = reduce(add, cone.facets, zero(n))

    @lru_cache(maxsize=None)
    def member(x):
        if in_lattice(x, units):
            return True
        for g in rest:
            y = sub(x, g)
            if dot(grading, y) >= 0 and cone.contains(y) and member(reduce_mod(y, units)):
                return True
        return False

    def test(x):
        if not cone.contains(x) or not in_lattice(x, lattice):
            return False
        return member(reduce_mod(x, units))

    return test


def saturated_monoid(n: int, cone: Cone, lattice) -> AffineMonoid:
    """Canonical form of the saturated monoid ``cone ∩ lattice``."""
    lattice = hnf_basis(lattice, n)
    B = _basis_matrix(lattice, n)
    k = len(lattice)
    pre = cone.preimage(B)
    lin = pre.lineality
    if not lin:
        gens = [B.apply(x) for x in hilbert_basis(pre)]
        return AffineMonoid(n, tuple(sorted(set(gens))))
    proj, section = quotient_projection(lin, k)
    sharp_cone = Cone.from_generators(k - len(lin), [proj.apply(r) for r in pre.rays])
    hb = hilbert_basis(sharp_cone)
    units = hnf_basis([B.apply(b) for b in lin], n)
    lifted = [reduce_mod(B.apply(section.apply(x)), units) for x in hb]
    return AffineMonoid(n, tuple(sorted(set(lifted + _pm(units)))))


def monoid_new(rank: int, gens) -> AffineMonoid:
    """Canonicalized monoid generated by ``gens`` in ``Z^rank``."""
    gens = [vec(g) for g in gens]
    if any(len(g) != rank for g in gens):
        raise MonoidError(f"generator length does not match rank {rank}")
    gens = sorted({g for g in gens if any(g)})
    # drop redundant generators, largest first
    kept = list(gens)
    for g in sorted(gens, reverse=True):
        others = [h for h in kept if h != g]
        if g in AffineMonoid(rank, tuple(others)):
            kept = others
    M = AffineMonoid(rank, tuple(sorted(kept)))
    if M.is_saturated:
        return saturated_monoid(rank, M.cone, M.lattice)
    return M


def zero_monoid(rank: int) -> AffineMonoid:
    return AffineMonoid(rank, ())


def saturate(M: AffineMonoid) -> AffineMonoid:
    return saturated_monoid(M.rank, M.cone, M.lattice)


def sharpen(M: AffineMonoid):
    """Sharp quotient ``M / M^x`` with the projection matrix realizing it.

    The projection kills the saturated lineality lattice of ``cone(M)``, so any
    torsion of ``gp(M)/M^x`` is taken modulo torsion.
    """
    if M.is_sharp:
        return M, IntMatrix.identity(M.rank)
    proj, _ = quotient_projection(M.cone.lineality, M.rank)
    return monoid_new(proj.rows, [proj.apply(g) for g in M.gens]), proj


def sharpening_section(M: AffineMonoid) -> IntMatrix:
    _, proj = sharpen(M)
    return right_inverse(proj)


def faces(M: AffineMonoid) -> list:
    """Faces of a saturated monoid, from the unit group up to ``M``."""
    if not M.is_saturated:
        raise MonoidError("faces requires a saturated monoid")
    out = []
    for tau in cone_faces(M.cone):
        out.append(AffineMonoid(M.rank, tuple(g for g in M.gens if tau.contains(g))))
    return sorted(out, key=lambda F: (F.cone.dim, F.gens))


def is_face(M: AffineMonoid, F: AffineMonoid) -> bool:
    return F in faces(M)


def localize(M: AffineMonoid, F: AffineMonoid) -> AffineMonoid:
    """``M - F``: the monoid generated by ``M`` and the inverses of the face ``F``."""
    if not is_face(M, F):
        raise MonoidError("not a face of the monoid")
    return monoid_new(M.rank, list(M.gens) + [neg(g) for g in F.gens])


def extend_fs(Q: AffineMonoid, E) -> AffineMonoid:
    """Smallest saturated monoid in ``gp(Q)`` containing ``Q`` and ``E``."""
    E = [vec(e) for e in E]
    for e in E:
        if len(e) != Q.rank or not in_lattice(e, Q.lattice):
            raise MonoidError(f"{e} does not lie in gp(Q)")
    cone = Cone.from_generators(Q.rank, list(Q.gens) + E)
    return saturated_monoid(Q.rank, cone, Q.lattice)


# ---------------------------------------------------------------------------
# ideals

@dataclass(frozen=True)
class MonoidIdeal:
    """Ideal ``K`` of an affine monoid, stored by a minimal generating set."""

    parent: AffineMonoid
    gens: tuple

    def __contains__(self, x) -> bool:
        x = vec(x)
        return any(sub(x, g) in self.parent for g in self.gens)

    @property
    def is_empty(self) -> bool:
        return not self.gens

    @property
    def is_principal(self) -> bool:
        return len(self.gens) == 1

    def __repr__(self):
        return f"MonoidIdeal(gens={list(self.gens)})"


def ideal_normalize(parent: AffineMonoid, gens) -> MonoidIdeal:
    gens = [vec(g) for g in gens]
    for g in gens:
        if g not in parent:
            raise MonoidError(f"ideal generator {g} is not in the monoid")
    units = parent.units
    if units and parent.is_saturated:
        gens = [reduce_mod(g, units) for g in gens]
    gens = sorted(set(gens))
    keep = []
    for g in gens:
        dominated = False
        for h in gens:
            if h == g or sub(g, h) not in parent:
                continue
            if sub(h, g) not in parent or h < g:
                dominated = True
                break
        if not dominated:
            keep.append(g)
    return MonoidIdeal(parent, tuple(keep))


def ideal_product(K: MonoidIdeal, K2: MonoidIdeal) -> MonoidIdeal:
    if K.parent != K2.parent:
        raise MonoidError("ideals of different monoids")
    return ideal_normalize(K.parent, [add(a, b) for a in K.gens for b in K2.gens])


def ideal_sharpen(K: MonoidIdeal) -> MonoidIdeal:
    Ms, proj = sharpen(K.parent)
    return ideal_normalize(Ms, [proj.apply(g) for g in K.gens])
