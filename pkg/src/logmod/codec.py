"""Conversion between domain objects and documents (nested dicts)."""
from __future__ import annotations

from .fan import Fan, PLFunction
from .lattice import Cone, IntMatrix, vec
from .monoid import AffineMonoid, MonoidIdeal, ideal_normalize, monoid_new
from .morphism import (
    Integral,
    MonoidHom,
    NotIntegral,
    UnknownUpTo,
    hom_new,
)


class DocumentError(ValueError):
    """A document is well formed but does not describe a valid object."""


def _get(doc, key, where):
    if not isinstance(doc, dict) or key not in doc:
        raise DocumentError(f"{where}: missing field '{key}'")
    return doc[key]


def _int(doc, key, where):
    v = _get(doc, key, where)
    if not isinstance(v, int) or isinstance(v, bool):
        raise DocumentError(f"{where}.{key}: expected an integer")
    return v


def _vectors(doc, key, where, length=None, required=True):
    if not required and key not in doc:
        return []
    v = _get(doc, key, where)
    if isinstance(v, tuple):  # a single vector written with '='
        v = [v]
    if not isinstance(v, list):
        raise DocumentError(f"{where}.{key}: expected a list of vectors")
    out = []
    for x in v:
        if not isinstance(x, (tuple, list)) or not all(isinstance(c, int) for c in x):
            raise DocumentError(f"{where}.{key}: expected integer vectors")
        if length is not None and len(x) != length:
            raise DocumentError(f"{where}.{key}: vector {list(x)} should have length {length}")
        out.append(tuple(x))
    return out


def _vector(doc, key, where, length=None):
    v = _get(doc, key, where)
    if isinstance(v, list) and not v:
        v = ()
    if not isinstance(v, tuple):
        raise DocumentError(f"{where}.{key}: expected a vector")
    if length is not None and len(v) != length:
        raise DocumentError(f"{where}.{key}: expected length {length}")
    return v


# -- monoids, ideals, homs -------------------------------------------------

def monoid_to_doc(M: AffineMonoid) -> dict:
    return {"rank": M.rank, "gens": [tuple(g) for g in M.gens]}


def monoid_from_doc(doc, where="monoid") -> AffineMonoid:
    n = _int(doc, "rank", where)
    if n < 0:
        raise DocumentError(f"{where}.rank: must be nonnegative")
    return monoid_new(n, _vectors(doc, "gens", where, n))


def ideal_to_doc(K: MonoidIdeal) -> dict:
    return {"gens": [tuple(g) for g in K.gens]}


def ideal_from_doc(doc, parent: AffineMonoid, where="ideal") -> MonoidIdeal:
    try:
        return ideal_normalize(parent, _vectors(doc, "gens", where, parent.rank))
    except ValueError as e:
        raise DocumentError(f"{where}: {e}") from None


def matrix_to_doc(A: IntMatrix) -> list:
    return [tuple(r) for r in A.entries]


def matrix_from_doc(rows, cols, where) -> IntMatrix:
    if isinstance(rows, tuple):
        rows = [rows]
    if not isinstance(rows, list):
        raise DocumentError(f"{where}: expected matrix rows")
    for r in rows:
        if len(r) != cols:
            raise DocumentError(f"{where}: row {list(r)} should have length {cols}")
    return IntMatrix.from_rows([tuple(r) for r in rows], cols)


def hom_to_doc(h: MonoidHom) -> dict:
    return {"source": monoid_to_doc(h.source), "target": monoid_to_doc(h.target),
            "matrix": matrix_to_doc(h.matrix)}


def hom_from_doc(doc, where="hom") -> MonoidHom:
    Q = monoid_from_doc(_get(doc, "source", where), f"{where}.source")
    P = monoid_from_doc(_get(doc, "target", where), f"{where}.target")
    rows = _get(doc, "matrix", where)
    if (isinstance(rows, list) and len(rows) != P.rank) or (isinstance(rows, tuple) and P.rank != 1):
        raise DocumentError(f"{where}.matrix: expected {P.rank} rows")
    A = matrix_from_doc(rows, Q.rank, f"{where}.matrix") if P.rank else IntMatrix.zeros(0, Q.rank)
    try:
        return hom_new(Q, P, A)
    except ValueError as e:
        raise DocumentError(f"{where}: {e}") from None


# -- cones, fans, PL functions ---------------------------------------------

def cone_to_doc(c: Cone) -> list:
    return [tuple(r) for r in c.rays]


def cone_from_doc(gens, n, where) -> Cone:
    if isinstance(gens, tuple):
        gens = [gens]
    for g in gens:
        if len(g) != n:
            raise DocumentError(f"{where}: generator {list(g)} should have length {n}")
    return Cone.from_generators(n, gens)


def fan_to_doc(f: Fan) -> dict:
    return {"rank": f.ambient_rank, "cones": [cone_to_doc(c) for c in f.cones]}


def fan_from_doc(doc, where="fan", validate=False) -> Fan:
    n = _int(doc, "rank", where)
    cones = _get(doc, "cones", where)
    if not isinstance(cones, list):
        raise DocumentError(f"{where}.cones: expected a list of cones")
    if cones and all(isinstance(x, tuple) for x in cones):
        raise DocumentError(f"{where}.cones: write each cone as 'cones.<i> += [ray]'")
    cs = [cone_from_doc(g, n, f"{where}.cones.{i}") for i, g in enumerate(cones)]
    if validate:
        return Fan(n, tuple(sorted(dict.fromkeys(cs), key=lambda c: (c.rays, c.ineqs))))
    return Fan.new(n, cs)


def pl_to_doc(s: PLFunction) -> dict:
    return {"type": s.kind, "pieces": [tuple(p) for p in s.pieces]}


def pl_pieces_from_doc(doc, n, where="pl"):
    kind = _get(doc, "type", where)
    if kind not in ("min", "max"):
        raise DocumentError(f"{where}.type: expected min or max")
    return kind, _vectors(doc, "pieces", where, n)


# -- verdicts ---------------------------------------------------------------

def witness_to_doc(w) -> dict | None:
    if w is None:
        return None
    return {k: tuple(x) for k, x in zip(("a1", "a2", "b1", "b2"), w)}


def witness_from_doc(doc):
    if doc is None:
        return None
    return tuple(vec(doc[k]) if doc[k] != [] else () for k in ("a1", "a2", "b1", "b2"))


def verdict_to_doc(v) -> dict | None:
    if v is None:
        return None
    if isinstance(v, Integral):
        d = {"verdict": "Integral", "certificate": v.certificate}
        if v.certificate == "FreeModule":
            d["coset_generators"] = [tuple(x) for x in v.details]
        elif v.certificate == "MiracleFlatness":
            d["fiber_dim"] = dict(v.details)["fiber_dim"]
    elif isinstance(v, NotIntegral):
        d = {"verdict": "NotIntegral", "reason": v.reason, "witness": witness_to_doc(v.witness)}
    elif isinstance(v, UnknownUpTo):
        d = {"verdict": "UnknownUpTo", "bound": v.bound}
    else:
        raise TypeError(v)
    d["sharpened"] = v.sharpened
    return d
