"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import contextlib
import io
import random
import time
from itertools import combinations
from pathlib import Path

import pytest

from logmod import generators as G
from logmod.blowup import base_change_verify, blowup_charts, blowup_laws_check
from logmod.cli import main
from logmod.fan import (
    chart_of_cone,
    fan_from_cone,
    is_smooth,
    pl_from_ideal,
    resolve_smooth,
    same_support,
    subdivide_by_pl,
)
from logmod.lattice import Cone, IntMatrix
from logmod.monoid import extend_fs, monoid_new, saturate
from logmod.morphism import (
    Integral,
    NoViolationUpTo,
    NotIntegral,
    Violated,
    exact_closure,
    hom_new,
    inclusion,
    is_exact_hom,
    is_exact_morphism,
    is_integral,
    is_isomorphism_onto,
    kato_bounded,
    pushout_fs,
)
from logmod.pipeline import exactify, integralize, verify_exactification

import oracle

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
N2 = monoid_new(2, [(1, 0), (0, 1)])
N3 = monoid_new(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
TWISTED = hom_new(N2, N3, [(1, 0), (1, 1), (0, 1)])


@pytest.fixture
def report(capsys):
    def emit(n, title, failures, started, limit=None):
        took = time.perf_counter() - started
        ok = not failures and (limit is None or took < limit)
        extra = f"{len(failures)} failures" if failures else "0 failures"
        if limit is not None:
            extra += f", {took:.1f}s (limit {limit}s)"
        with capsys.disabled():
            print(f"\ncriterion {n:>2} {'PASS' if ok else 'FAIL'}: {title} ({extra})")
        assert not failures, failures[:3]
        if limit is not None:
            assert took < limit
    return emit


def test_criterion_01_exactness_oracle(report):
    t = time.perf_counter()
    rng = random.Random(101)
    fails = []
    for i in range(200):
        h = G.saturated_hom(rng)
        rows = h.matrix.tolist()
        viol = oracle.exactness_violation(h.source.gens, h.source.rank, h.target.gens, h.target.rank, rows, 10)
        Qo = oracle.SaturatedOracle(h.source.gens, h.source.rank)
        brute = viol is None and all(g in Qo for g in exact_closure(h).gens)
        if is_exact_hom(h) != brute:
            fails.append((i, h))
    report(1, "exactness agrees with brute force on 200 homs", fails, t, 60)


def test_criterion_02_pushout_along_gp_extension(report):
    t = time.perf_counter()
    rng = random.Random(202)
    fails = []
    for i in range(100):
        Q = G.saturated_monoid(rng)
        E = [G.lattice_element(rng, Q) for _ in range(rng.randint(1, 3))]
        P = extend_fs(Q, E)
        V = extend_fs(Q, E[:rng.randint(0, len(E))])
        po = pushout_fs(inclusion(Q, P), inclusion(Q, V))
        if not is_isomorphism_onto(po.inj_P, P, po.monoid):
            fails.append(i)
    report(2, "push-out along gp-preserving extensions is P (100 cases)", fails, t)


def test_criterion_03_base_change_stability(report):
    t = time.perf_counter()
    rng = random.Random(303)
    fails = []
    for i in range(100):
        h = G.exact_hom(rng)
        Q = h.source
        m = rng.randint(1, 3)
        A = IntMatrix.from_rows([tuple(rng.randint(-2, 2) for _ in range(Q.rank)) for _ in range(m)], Q.rank)
        extra = [tuple(rng.randint(-2, 2) for _ in range(m)) for _ in range(rng.randint(0, 2))]
        Q2 = saturate(monoid_new(m, [A.apply(g) for g in Q.gens] + extra))
        g = hom_new(Q, Q2, A)
        if not (is_exact_hom(h) and is_exact_hom(pushout_fs(h, g).hom_from_Q2(Q2))):
            fails.append(i)
    report(3, "exactness survives base change (100 pairs)", fails, t)


def test_criterion_04_integrality_consistency(report):
    t = time.perf_counter()
    rng = random.Random(404)
    fails = []
    for i in range(100):
        h = G.local_finite_hom(rng)
        v = is_integral(h, "free_module")
        r = kato_bounded(h, 8)
        if isinstance(r, Violated) and not isinstance(v, NotIntegral):
            fails.append((i, "violation but not NotIntegral"))
        if isinstance(v, Integral) and not isinstance(r, NoViolationUpTo):
            fails.append((i, "Integral but violation"))
    w = kato_bounded(TWISTED, 1)
    if not (isinstance(is_integral(TWISTED), NotIntegral) and isinstance(w, Violated)
            and w.witness == ((1, 0), (0, 1), (0, 0, 1), (1, 0, 0))):
        fails.append("twisted witness")
    even = hom_new(monoid_new(2, [(2, 0), (0, 2)]), monoid_new(2, [(2, 0), (0, 2), (1, 1)]), IntMatrix.identity(2))
    if not isinstance(is_integral(even), Integral):
        fails.append("even lattice")
    report(4, "FreeModule never contradicts kato_bounded(B=8); shipped witnesses", fails, t)


def test_criterion_05_blowup_laws(report):
    t = time.perf_counter()
    rng = random.Random(505)
    fails = []
    for i in range(50):
        Q = G.sharp_monoid(rng, rng.randint(1, 3), entry=2)
        rep = blowup_laws_check(Q, G.ideal(rng, Q), G.ideal(rng, Q))
        if not rep.ok:
            fails.append((i, [n for n, ok in rep.checks if not ok]))
    report(5, "blow-up laws on 50 random (Q, K, K')", fails, t, 60)


def test_criterion_06_base_change_identities(report):
    t = time.perf_counter()
    rng = random.Random(606)
    fails = []
    for i in range(50):
        Q = G.sharp_monoid(rng, rng.randint(1, 3), entry=2)
        P = G.gp_extension(rng, Q)
        rep = base_change_verify(Q, P)
        if not rep.ok:
            fails.append((i, [n for n, ok in rep.checks if not ok]))
    report(6, "chartwise base-change identities on 50 extensions", fails, t)


def test_criterion_07_exactification(report):
    t = time.perf_counter()
    fails = []
    h = inclusion(N2, extend_fs(N2, [(1, -1)]))
    if is_exact_hom(h):
        fails.append("plane chart already exact")
    res = exactify(N2, [h])
    s = pl_from_ideal(N2, res.base_ideal)
    # ord - min(x1, x2) must be linear on the quadrant
    a, b = s((1, 0)), s((0, 1))
    if any(s(n) - min(n) != a * n[0] + b * n[1] for n in oracle.box(2, 6) if min(n) >= 0):
        fails.append("ord is not min(x1, x2) up to a linear shift")
    if not (res.ok and verify_exactification(res)):
        fails.append("plane cover")
    if not all(is_exact_morphism(v.hom).holds for v in res.per_chart):
        fails.append("plane charts not pointwise exact")
    rng = random.Random(707)
    done = 0
    while done < 30:
        Q = G.sharp_monoid(rng, 2, entry=2)
        hs = [G.gp_injective_chart(rng, Q) for _ in range(rng.randint(1, 2))]
        if all(is_exact_hom(x) for x in hs):
            continue
        done += 1
        res = exactify(Q, hs)
        if not (res.ok and verify_exactification(res)):
            fails.append(done)
    report(7, "exactification: plane chart plus 30 random charts", fails, t, 120)


def test_criterion_08_integralization(report):
    t = time.perf_counter()
    fails = []
    if not is_exact_hom(TWISTED) or not isinstance(is_integral(TWISTED), NotIntegral):
        fails.append("precondition")
    res = integralize(TWISTED)
    if not is_smooth(res.base_fan):
        fails.append("base fan not smooth")
    if not {(1, 0), (1, 1), (0, 1)} <= set(res.base_fan.rays):
        fails.append("missing image rays")
    for c in res.charts:
        if not (isinstance(c.verdict, Integral) and c.verdict.certificate == "MiracleFlatness"):
            fails.append(("verdict", c.base_cone))
        if not is_exact_morphism(c.hom).holds:
            fails.append(("exact", c.base_cone))
        if not isinstance(kato_bounded(c.hom, 6), NoViolationUpTo):
            fails.append(("kato", c.base_cone))
    report(8, "integralization of the twisted hom", fails, t, 30)


def test_criterion_09_toric_round_trip(report):
    t = time.perf_counter()
    rng = random.Random(909)
    fails = []
    for i in range(50):
        Q = G.sharp_monoid(rng, rng.randint(1, 3), entry=2)
        K = G.ideal(rng, Q)
        direct = {c.monoid for c in blowup_charts(Q, K).charts}
        fan = subdivide_by_pl(fan_from_cone(Q.cone.dual()), pl_from_ideal(Q, K))
        toric = {chart_of_cone(c, Q.lattice) for c in fan.cones}
        if direct != toric:
            fails.append(i)
    report(9, "blowup_charts equals the toric chart construction (50 cases)", fails, t)


def test_criterion_10_hirzebruch_jung(report):
    t = time.perf_counter()
    fails = []
    for k in range(2, 6):
        c = Cone.from_generators(2, [(1, 0), (1, k)])
        f = resolve_smooth(fan_from_cone(c))
        if len(f.rays) - 2 != oracle.hj_length((1, 0), (1, k)):
            fails.append((k, "count"))
        if not (is_smooth(f) and same_support(f, fan_from_cone(c))):
            fails.append((k, "smooth/support"))
    report(10, "resolve_smooth matches Hirzebruch-Jung for k = 2..5", fails, t)


def _runs():
    homs = sorted(CORPUS.glob("*.hom"))
    runs = [["analyze", str(p)] for p in homs]
    runs += [["integralize", str(p)] for p in homs]
    runs += [["pushout", str(a), str(b)] for a, b in combinations(homs, 2)]
    runs += [["blowup", str(CORPUS / "n2.monoid"), str(p)] for p in sorted(CORPUS.glob("*.ideal"))]
    runs += [["exactify", str(p)] for p in sorted(CORPUS.glob("*.job"))]
    for p in sorted(CORPUS.glob("*.fan")):
        runs += [["fan", sub, str(p)] for sub in ("resolve", "check", "emit-geometry")]
    runs.append(["fan", "subdivide", str(CORPUS / "quadrant.fan"), str(CORPUS / "ord_e1e2.pl")])
    runs += [["--seed", "3", "sample", w] for w in ("monoid", "hom", "local-hom", "exact-hom")]
    return runs


def _call(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue()


def test_criterion_11_cli_determinism(report, tmp_path):
    t = time.perf_counter()
    fails = []
    emitted = 0
    for i, argv in enumerate(_runs()):
        a, b = _call(argv), _call(argv)
        if a != b:
            fails.append((argv, "differs"))
        if a[0] == 3:
            fails.append((argv, "internal error"))
        if a[0] in (0, 1) and "sample" not in argv:
            f = tmp_path / f"r{i}.txt"
            f.write_text(a[1])
            emitted += 1
            if _call(["verify", str(f)])[0] != 0:
                fails.append((argv, "verify rejected"))
    if emitted < 20:
        fails.append(("too few results", emitted))
    report(11, f"CLI byte-identical on {len(_runs())} corpus runs; verify accepts {emitted} results", fails, t)
