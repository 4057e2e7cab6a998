"""End-to-end constructions: analysis, exactification and integralization of charts."""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

from .blowup import ChartCover, blowup_charts, common_denominator
from .fan import (
    Fan,
    PLFunction,
    chart_of_cone,
    common_refinement,
    cones_map_onto,
    fan_from_cone,
    ideal_from_pl,
    is_smooth,
    pl_sum,
    preimage_fan,
    projective_support,
    pullback_pl,
    resolve_smooth,
    same_support,
    subdivide_by_pl,
)
from .lattice import Cone, IntMatrix, add, primitive, scale, zero
from .monoid import AffineMonoid, MonoidIdeal, ideal_normalize, ideal_product
from .morphism import (
    DEFAULT_BOUND,
    Integral,
    MonoidHom,
    MorphismError,
    NoViolationUpTo,
    NotIntegral,
    StrategyInapplicable,
    exact_closure,
    hom_new,
    inclusion,
    is_exact_hom,
    is_exact_morphism,
    is_integral,
    is_integral_morphism,
    kato_bounded,
    neatness_report,
    pushout_fs,
    sharpened,
)

CROSS_CHECK_BOUND = 6


class PipelineError(ValueError):
    """Unmet preconditions of a pipeline."""


class CertificationError(AssertionError):
    """A step that the construction guarantees did not verify."""


@dataclass(frozen=True)
class Analysis:
    neatness: object
    exact_hom: bool | None
    exact_closure: AffineMonoid | None
    exact_morphism: object
    integral: object
    integral_morphism: object

    @property
    def exact(self):
        return self.exact_hom

    @property
    def integral_ok(self):
        return self.integral_morphism.holds if self.integral_morphism is not None else None


def analyze(h: MonoidHom, bound: int = DEFAULT_BOUND) -> Analysis:
    """Neatness, exactness and integrality of ``h``, at hom level and face by face."""
    nr = neatness_report(h)
    saturated = h.source.is_saturated and h.target.is_saturated
    exact = closure = exact_m = integral_m = None
    if saturated:
        closure = exact_closure(h)
        exact = closure == h.source
        exact_m = is_exact_morphism(h)
        integral_m = is_integral_morphism(h, bound)
    try:
        integral = is_integral(h, "auto", bound)
    except MorphismError as e:
        integral = NotIntegral(None, f"undecided: {e}") if not nr.is_local else None
        if nr.is_local:
            raise
    return Analysis(nr, exact, closure, exact_m, integral, integral_m)


# ---------------------------------------------------------------------------
# exactification

@dataclass(frozen=True)
class ChartVerdict:
    chart_label: tuple
    input_index: int
    hom: MonoidHom
    exact: bool


@dataclass(frozen=True)
class ExactificationResult:
    base: AffineMonoid
    inputs: tuple
    partial_ideals: tuple
    base_ideal: MonoidIdeal
    cover: ChartCover
    per_chart: tuple

    @property
    def ok(self) -> bool:
        return all(v.exact for v in self.per_chart)


def exactify(Q: AffineMonoid, homs) -> ExactificationResult:
    """Blow up ``Q`` along a product ideal so every base-changed chart becomes exact."""
    homs = tuple(homs)
    if not homs:
        raise PipelineError("exactify needs at least one chart")
    if not (Q.is_sharp and Q.is_saturated):
        raise PipelineError("base monoid must be sharp and saturated")
    partial = []
    for i, h in enumerate(homs):
        if h.source != Q:
            raise PipelineError(f"chart {i} does not start at the base monoid")
        if not h.gp_injective:
            raise PipelineError(f"chart {i} is not gp-injective")
        if not h.target.is_saturated:
            raise PipelineError(f"chart {i} has a non-saturated target")
        b, a = common_denominator(Q, exact_closure(h))
        partial.append(ideal_normalize(Q, [b] + a))
    K = reduce(ideal_product, partial)
    cover = blowup_charts(Q, K)
    per_chart = []
    for c in cover.charts:
        for i, h in enumerate(homs):
            po = pushout_fs(h, inclusion(Q, c.monoid))
            g = po.hom_from_Q2(c.monoid)
            per_chart.append(ChartVerdict(c.label, i, g, bool(is_exact_morphism(g).holds)))
    return ExactificationResult(Q, homs, tuple(partial), K, cover, tuple(per_chart))


def verify_exactification(res: ExactificationResult) -> bool:
    return all(bool(is_exact_morphism(v.hom).holds) == v.exact for v in res.per_chart) and res.ok


# ---------------------------------------------------------------------------
# integralization

@dataclass(frozen=True)
class ChartCertificate:
    base_cone: Cone
    source_cone: Cone
    hom: MonoidHom
    verdict: object
    cross_check: object
    exact: bool


@dataclass(frozen=True)
class IntegralizationResult:
    """Everything lives in ``gp`` coordinates: ``basis_Q``/``basis_P`` map them back."""

    hom: MonoidHom
    basis_Q: IntMatrix
    basis_P: IntMatrix
    support_function: PLFunction
    base_ideal: MonoidIdeal
    subdivision: Fan
    base_fan: Fan
    source_fan: Fan
    charts: tuple

    @property
    def chart_homs(self):
        return [c.hom for c in self.charts]

    @property
    def certificates(self):
        return [c.verdict for c in self.charts]


def _shift_into(Q: AffineMonoid, pieces):
    """Smallest multiple ``m`` of the generator sum with ``p + m`` in ``Q`` for all pieces."""
    total = reduce(add, Q.gens, zero(Q.rank))
    c = 0
    while not all(add(p, scale(c, total)) in Q for p in pieces):
        c += 1
    return scale(c, total)


def integralize(h: MonoidHom, bound: int = CROSS_CHECK_BOUND) -> IntegralizationResult:
    """Subdivide the dual cone of the base until every chart hom is integral."""
    Q, P = h.source, h.target
    if not (Q.is_sharp and P.is_sharp and Q.is_saturated and P.is_saturated):
        raise PipelineError("integralize needs sharp saturated monoids")
    if not h.gp_injective:
        raise PipelineError("hom is not gp-injective")
    if not h.is_local:
        raise PipelineError("hom is not local")
    if not is_exact_hom(h):
        raise PipelineError("hom is not exact")
    Qc, BQ = Q.coordinates()
    Pc, BP = P.coordinates()
    X = h.gp_matrix
    hc = MonoidHom(Qc, Pc, X)
    kQ = Qc.rank
    phi = X.T
    sigma_Q = Qc.cone.dual()
    sigma_P = Pc.cone.dual()
    terms = [projective_support(primitive(phi.apply(r))) for r in sigma_P.extreme_rays
             if any(phi.apply(r))]
    full = Cone.full_space(kQ)
    if terms:
        s = pl_sum(terms, full)
    else:
        s = PLFunction.from_pieces(full, [zero(kQ)], "max")
    t = s.negate()
    t = t.shift(_shift_into(Qc, t.pieces))
    K = ideal_from_pl(Qc, t.restrict(sigma_Q))
    base = fan_from_cone(sigma_Q)
    subdivision = subdivide_by_pl(base, s)
    base_fan = resolve_smooth(subdivision)
    top = fan_from_cone(sigma_P)
    src = subdivide_by_pl(top, pullback_pl(phi, s, top))
    source_fan = common_refinement(src, preimage_fan(phi, base_fan, top))
    onto = cones_map_onto(phi, source_fan, base_fan)
    if not onto.onto or not onto.constant_fiber:
        raise CertificationError(f"cones do not map onto cones with constant fiber dimension: {onto}")
    charts = []
    for tau_p in source_fan.cones:
        tau = tau_p.image(phi)
        g = hom_new(chart_of_cone(tau), chart_of_cone(tau_p), X)
        try:
            verdict = is_integral(g, "miracle", bound)
        except StrategyInapplicable as e:
            raise CertificationError(f"miracle flatness inapplicable on {tau_p.rays} -> {tau.rays}: {e}")
        if not isinstance(verdict, Integral):
            raise CertificationError(f"chart {tau_p.rays} -> {tau.rays} not certified: {verdict}")
        cross = kato_bounded(sharpened(g), bound)
        if not isinstance(cross, NoViolationUpTo):
            raise CertificationError(f"kato cross-check failed on {tau_p.rays}: {cross}")
        exact = bool(is_exact_morphism(g).holds)
        if not exact:
            raise CertificationError(f"integral chart hom is not exact on {tau_p.rays}")
        charts.append(ChartCertificate(tau, tau_p, g, verdict, cross, exact))
    return IntegralizationResult(hc, BQ, BP, s, K, subdivision, base_fan, source_fan, tuple(charts))


def verify_integralization(res: IntegralizationResult, bound: int = CROSS_CHECK_BOUND) -> bool:
    phi = res.hom.matrix.T
    if not is_smooth(res.base_fan):
        return False
    if not same_support(fan_from_cone(res.hom.source.cone.dual()), res.base_fan):
        return False
    if not same_support(fan_from_cone(res.hom.target.cone.dual()), res.source_fan):
        return False
    onto = cones_map_onto(phi, res.source_fan, res.base_fan)
    if not (onto.onto and onto.constant_fiber):
        return False
    for c in res.charts:
        if not isinstance(is_integral(c.hom, "miracle", bound), Integral):
            return False
        if not isinstance(kato_bounded(sharpened(c.hom), bound), NoViolationUpTo):
            return False
    return True
