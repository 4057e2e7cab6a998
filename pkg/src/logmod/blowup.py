"""Log blow-up chart covers along monoid ideals."""
from __future__ import annotations

from dataclasses import dataclass

from .fan import Fan, common_refinement, fan_from_cone, pl_from_ideal, same_support
from .lattice import Cone, IntMatrix, add, solve_linear, sub, vec, zero
from .monoid import (
    AffineMonoid,
    MonoidIdeal,
    extend_fs,
    ideal_normalize,
    ideal_product,
)
from .morphism import MonoidHom, inclusion, is_isomorphism_onto, pushout_fs


class BlowupError(ValueError):
    """Invalid blow-up data."""


@dataclass(frozen=True)
class Chart:
    label: tuple
    monoid: AffineMonoid
    cone: Cone


@dataclass(frozen=True)
class ChartCover:
    base: AffineMonoid
    ideal: MonoidIdeal
    charts: tuple

    @property
    def fan(self) -> Fan:
        return Fan.new(self.base.rank, [c.cone for c in self.charts])

    def chart(self, label) -> Chart:
        label = vec(label)
        return next(c for c in self.charts if c.label == label)


def ideal_pullback(h: MonoidHom, K: MonoidIdeal) -> MonoidIdeal:
    if K.parent != h.source:
        raise BlowupError("ideal does not live on the source of the hom")
    return ideal_normalize(h.target, [h(k) for k in K.gens])


def blowup_charts(Q: AffineMonoid, K: MonoidIdeal) -> ChartCover:
    """Charts ``Q<K - p>`` over the maximal linearity domains of ``ord_K``."""
    if K.is_empty:
        raise BlowupError("blow-up along empty ideal undefined")
    if not Q.is_sharp:
        raise BlowupError("blow-up charts need a sharp monoid; sharpen first")
    if not Q.is_saturated:
        raise BlowupError("blow-up charts need a saturated monoid")
    if K.parent != Q:
        raise BlowupError("ideal does not belong to the monoid")
    s = pl_from_ideal(Q, K)
    charts = []
    for cell, p in zip(s.fan.cones, s.linear_data):
        M = extend_fs(Q, [sub(k, p) for k in K.gens])
        charts.append(Chart(p, M, cell))
    return ChartCover(Q, K, tuple(sorted(charts, key=lambda c: c.label)))


def is_locally_principal(cover: ChartCover) -> bool:
    """On every chart the ideal becomes the principal ideal of its label."""
    K = cover.ideal
    for c in cover.charts:
        if c.label not in K:
            return False
        if any(sub(k, c.label) not in c.monoid for k in K.gens):
            return False
    return True


def trivial_cover(Q: AffineMonoid, K: MonoidIdeal, label) -> ChartCover:
    """The cover by ``Q`` alone, labelled by ``label``."""
    return ChartCover(Q, K, (Chart(vec(label), Q, Q.cone.dual()),))


def common_denominator(Q: AffineMonoid, P: AffineMonoid):
    """``(b, a)`` with ``P = Q<a_1 - b, ..., a_r - b>`` and all of ``b, a_i`` in ``Q``."""
    if Q.rank != P.rank or Q.lattice != P.lattice:
        raise BlowupError("not a gp-isomorphism extension")
    if any(g not in P for g in Q.gens):
        raise BlowupError("Q is not contained in P")
    G = IntMatrix.from_columns(Q.gens, Q.rank)
    parts = []
    for p in P.gens:
        if p in Q:
            continue
        c = solve_linear(G, p)[0]
        a_i, b_i = zero(Q.rank), zero(Q.rank)
        for ci, g in zip(c, Q.gens):
            if ci > 0:
                a_i = add(a_i, tuple(ci * x for x in g))
            elif ci < 0:
                b_i = add(b_i, tuple(-ci * x for x in g))
        parts.append((p, b_i))
    b = zero(Q.rank)
    for _, b_i in parts:
        b = add(b, b_i)
    a = sorted({add(p, b) for p, _ in parts})
    if extend_fs(Q, [sub(x, b) for x in a]) != P:
        raise AssertionError("common denominator does not reproduce P")
    return b, a


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    checks: tuple  # (name, passed)
    note: str = ""


def _pushout_is(P: AffineMonoid, Q: AffineMonoid, V: AffineMonoid, expected: AffineMonoid) -> bool:
    """Whether the fs push-out of ``P <- Q -> V`` is ``expected`` via the coprojection from ``P``."""
    po = pushout_fs(inclusion(Q, P), inclusion(Q, V))
    return is_isomorphism_onto(po.inj_P, expected, po.monoid)


def base_change_verify(Q: AffineMonoid, P: AffineMonoid) -> CheckReport:
    """Chartwise base-change identities for ``Q ⊆ P``."""
    b, a = common_denominator(Q, P)
    K = ideal_normalize(Q, [b] + a)
    cover = blowup_charts(Q, K)
    # V0 = Q<a_j - b> need not be a maximal chart: when b is not a minimal
    # generator of K its locus is a proper face of the fan
    V0 = extend_fs(Q, [sub(x, b) for x in a])
    checks = [("V0: push-out = P", _pushout_is(P, Q, V0, P))]
    for c in cover.charts:
        p = c.label
        if p == b:
            continue
        target = extend_fs(P, [sub(b, p)])
        checks.append((f"V {list(p)}: push-out = P<b - a>", _pushout_is(P, Q, c.monoid, target)))
        meet = extend_fs(c.monoid, [sub(p, b)])
        checks.append((f"V0 ∩ V {list(p)}: push-out = push-out with V",
                       _pushout_is(P, Q, meet, target)))
    ok = all(x for _, x in checks)
    return CheckReport(ok, tuple(checks))


def blowup_laws_check(Q: AffineMonoid, K: MonoidIdeal, K2: MonoidIdeal) -> CheckReport:
    """Principality, idempotence and the product law for ideals ``K``, ``K2`` of ``Q``."""
    if K.is_empty or K2.is_empty:
        raise BlowupError("blow-up along empty ideal undefined")
    cover = blowup_charts(Q, K)
    cover2 = blowup_charts(Q, K2)
    checks = [("pulled ideal principal", is_locally_principal(cover) and all(
        ideal_normalize(c.monoid, K.gens).is_principal for c in cover.charts))]
    idem = True
    for c in cover.charts:
        again = blowup_charts(c.monoid, ideal_normalize(c.monoid, K.gens))
        idem &= len(again.charts) == 1 and again.charts[0].monoid == c.monoid
    checks.append(("self-product idempotent", idem))

    def iterated(first, second_gens):
        cells = []
        for c in first.charts:
            sub_cover = blowup_charts(c.monoid, ideal_normalize(c.monoid, second_gens))
            cells.extend(x.cone for x in sub_cover.charts)
        return Fan.new(Q.rank, cells)

    product = blowup_charts(Q, ideal_product(K, K2)).fan
    refinement = common_refinement(cover.fan, cover2.fan)
    checks.append(("product fan = common refinement", product == refinement))
    checks.append(("product fan = iterated (K then K')", product == iterated(cover, K2.gens)))
    checks.append(("product fan = iterated (K' then K)", product == iterated(cover2, K.gens)))
    checks.append(("support preserved", same_support(fan_from_cone(Q.cone.dual()), product)))
    return CheckReport(all(x for _, x in checks), tuple(checks))
