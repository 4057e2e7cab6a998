"""Command-line front end.

Exit codes: 0 success or verified, 1 negative verdict, 2 input error,
3 internal assertion failure.
"""
from __future__ import annotations

import argparse
import os
import random
import sys
from pathlib import Path

from . import codec, generators
from .blowup import BlowupError, blowup_charts, is_locally_principal
from .codec import DocumentError
from .fan import (
    FanError,
    PLFunction,
    fan_validate,
    is_smooth,
    resolve_smooth,
    same_support,
    subdivide_by_pl,
)
from .lattice import LatticeError
from .monoid import MonoidError
from .morphism import (
    DEFAULT_BOUND,
    MorphismError,
    face_localization,
    kato_witness_replays,
    pushout_fs,
    sharpened,
)
from .pipeline import (
    CROSS_CHECK_BOUND,
    CertificationError,
    PipelineError,
    analyze,
    exactify,
    integralize,
)
from .textio import FormatError, emit, emit_machine, parse_any

OK, NEGATIVE, INPUT_ERROR, INTERNAL = 0, 1, 2, 3
INPUT_ERRORS = (FormatError, DocumentError, MonoidError, MorphismError, LatticeError,
                FanError, BlowupError, PipelineError)


class VerifyMismatch(Exception):
    pass


def _read(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise FormatError(f"cannot read: {e.strerror}", None, path) from None
    return parse_any(text, path)


def _expect_kind(doc, kinds, where):
    kind = doc.get("kind")
    if kind not in kinds:
        raise DocumentError(f"{where}: expected kind {' or '.join(kinds)}, found {kind!r}")


def _strip(doc):
    return {k: v for k, v in doc.items() if k != "kind"}


# ---------------------------------------------------------------------------
# commands: each takes the parsed input documents and returns (result, exit code)

def _faces_table(report, render):
    return [{"face": [tuple(g) for g in F.gens], **render(v)} for F, v in report.table]


def cmd_analyze(inputs, bound):
    h = codec.hom_from_doc(_strip(inputs["hom"]))
    a = analyze(h, bound)
    nr = a.neatness
    res = {
        "neatness": {"gp_injective": nr.gp_injective, "coker_rank": nr.coker_rank,
                     "coker_torsion": tuple(nr.coker_torsion), "is_local": nr.is_local},
        "exact": a.exact_hom,
    }
    if a.exact_closure is not None:
        res["exact_closure"] = codec.monoid_to_doc(a.exact_closure)
    if a.exact_morphism is not None:
        res["exact_morphism"] = {"holds": a.exact_morphism.holds,
                                 "faces": _faces_table(a.exact_morphism, lambda v: {"exact": v})}
    res["integral"] = codec.verdict_to_doc(a.integral)
    if a.integral_morphism is not None:
        holds = a.integral_morphism.holds
        res["integral_morphism"] = {"holds": "unknown" if holds is None else holds,
                                    "faces": _faces_table(a.integral_morphism, codec.verdict_to_doc)}
    negative = a.exact_hom is False or (a.integral_morphism is not None and a.integral_morphism.holds is False)
    return res, NEGATIVE if negative else OK


def cmd_pushout(inputs, bound):
    h = codec.hom_from_doc(_strip(inputs["hom"]), "hom")
    g = codec.hom_from_doc(_strip(inputs["hom2"]), "hom2")
    po = pushout_fs(h, g)
    return {"monoid": codec.monoid_to_doc(po.monoid), "inj_P": codec.matrix_to_doc(po.inj_P),
            "inj_Q2": codec.matrix_to_doc(po.inj_Q2), "torsion": tuple(po.torsion)}, OK


def cmd_blowup(inputs, bound):
    Q = codec.monoid_from_doc(_strip(inputs["monoid"]))
    K = codec.ideal_from_doc(_strip(inputs["ideal"]), Q)
    cover = blowup_charts(Q, K)
    principal = is_locally_principal(cover)
    return {"base": codec.monoid_to_doc(Q), "ideal": codec.ideal_to_doc(K),
            "charts": [{"label": c.label, "monoid": codec.monoid_to_doc(c.monoid),
                        "cone": codec.cone_to_doc(c.cone)} for c in cover.charts],
            "locally_principal": principal}, OK if principal else INTERNAL


def _job_homs(doc):
    Q = codec.monoid_from_doc(doc.get("base"), "job.base")
    charts = doc.get("charts")
    if not isinstance(charts, list) or not charts:
        raise DocumentError("job.charts: expected at least one chart record")
    homs = []
    for i, c in enumerate(charts):
        where = f"job.charts.{i}"
        homs.append(codec.hom_from_doc({"source": codec.monoid_to_doc(Q), "target": c.get("target"),
                                        "matrix": c.get("matrix")}, where))
    return Q, homs


def cmd_exactify(inputs, bound):
    Q, homs = _job_homs(_strip(inputs["job"]))
    r = exactify(Q, homs)
    res = {
        "partial_ideals": [codec.ideal_to_doc(K) for K in r.partial_ideals],
        "base_ideal": codec.ideal_to_doc(r.base_ideal),
        "charts": [{"label": c.label, "monoid": codec.monoid_to_doc(c.monoid),
                    "cone": codec.cone_to_doc(c.cone)} for c in r.cover.charts],
        "verdicts": [{"chart": v.chart_label, "input": v.input_index, "exact": v.exact,
                      "hom": codec.hom_to_doc(v.hom)} for v in r.per_chart],
        "all_exact": r.ok,
    }
    return res, OK if r.ok else INTERNAL


def cmd_integralize(inputs, bound):
    h = codec.hom_from_doc(_strip(inputs["hom"]))
    r = integralize(h, min(bound, CROSS_CHECK_BOUND))
    res = {
        "basis_Q": codec.matrix_to_doc(r.basis_Q),
        "basis_P": codec.matrix_to_doc(r.basis_P),
        "support_function": codec.pl_to_doc(r.support_function),
        "base_ideal": codec.ideal_to_doc(r.base_ideal),
        "subdivision": codec.fan_to_doc(r.subdivision),
        "base_fan": codec.fan_to_doc(r.base_fan),
        "source_fan": codec.fan_to_doc(r.source_fan),
        "charts": [{"base_cone": codec.cone_to_doc(c.base_cone),
                    "source_cone": codec.cone_to_doc(c.source_cone),
                    "hom": codec.hom_to_doc(c.hom),
                    "certificate": codec.verdict_to_doc(c.verdict),
                    "cross_check_bound": c.cross_check.bound,
                    "exact_morphism": c.exact} for c in r.charts],
    }
    return res, OK


def _fan_input(inputs, validate=False):
    return codec.fan_from_doc(_strip(inputs["fan"]), validate=validate)


def cmd_fan_subdivide(inputs, bound):
    f = _fan_input(inputs)
    kind, pieces = codec.pl_pieces_from_doc(_strip(inputs["pl"]), f.ambient_rank)
    s = PLFunction.from_pieces(f, pieces, kind)
    g = subdivide_by_pl(f, s)
    return {"fan": codec.fan_to_doc(g), "support_preserved": same_support(f, g)}, OK


def cmd_fan_resolve(inputs, bound):
    f = _fan_input(inputs)
    g = resolve_smooth(f)
    return {"fan": codec.fan_to_doc(g), "smooth": is_smooth(g),
            "added_rays": [r for r in g.rays if r not in f.rays],
            "support_preserved": same_support(f, g)}, OK


def cmd_fan_check(inputs, bound):
    f = _fan_input(inputs, validate=True)
    valid = fan_validate(f)
    res = {"valid": valid, "smooth": bool(valid and is_smooth(f)), "rays": list(f.rays) if valid else []}
    return res, OK if valid else NEGATIVE


def cmd_fan_geometry(inputs, bound):
    f = _fan_input(inputs)
    return {"rank": f.ambient_rank,
            "cones": [{"dim": c.dim, "rays": list(c.extreme_rays), "lineality": list(c.lineality)}
                      for c in f.cones]}, OK


COMMANDS = {
    "analyze": (cmd_analyze, [("hom", ("hom",))]),
    "pushout": (cmd_pushout, [("hom", ("hom",)), ("hom2", ("hom",))]),
    "blowup": (cmd_blowup, [("monoid", ("monoid",)), ("ideal", ("ideal",))]),
    "exactify": (cmd_exactify, [("job", ("job",))]),
    "integralize": (cmd_integralize, [("hom", ("hom",))]),
    "fan subdivide": (cmd_fan_subdivide, [("fan", ("fan",)), ("pl", ("pl",))]),
    "fan resolve": (cmd_fan_resolve, [("fan", ("fan",))]),
    "fan check": (cmd_fan_check, [("fan", ("fan",))]),
    "fan emit-geometry": (cmd_fan_geometry, [("fan", ("fan",))]),
}


def run_command(name, inputs, bound):
    """Run ``name`` on parsed inputs; returns the full result document and exit code."""
    fn, _ = COMMANDS[name]
    payload, code = fn(inputs, bound)
    doc = {"kind": "result", "command": name, "bound": bound, "exit": code,
           "input": inputs, "result": payload}
    return doc, code


# ---------------------------------------------------------------------------
# verify

def _replay_witnesses(doc):
    """Replay every recorded Kato witness of an ``analyze`` result."""
    h = codec.hom_from_doc(_strip(doc["input"]["hom"]))
    res = doc["result"]
    integral = res.get("integral")
    if integral and integral.get("verdict") == "NotIntegral" and integral.get("witness"):
        target = sharpened(h) if integral.get("sharpened") else h
        if not kato_witness_replays(target, codec.witness_from_doc(integral["witness"])):
            raise VerifyMismatch("hom-level witness does not replay")
    im = res.get("integral_morphism")
    if im:
        from .monoid import faces
        fs = {F.gens: F for F in faces(h.target)}
        for row in im["faces"]:
            if row.get("verdict") == "NotIntegral" and row.get("witness"):
                F = fs[tuple(tuple(g) for g in row["face"])]
                hf = face_localization(h, F)
                if row.get("sharpened"):
                    hf = sharpened(hf)
                if not kato_witness_replays(hf, codec.witness_from_doc(row["witness"])):
                    raise VerifyMismatch(f"witness at face {row['face']} does not replay")


def _normalize(doc):
    return emit_machine(doc)


def verify_result(doc) -> str:
    """Recompute a result document and re-check its certificates."""
    _expect_kind(doc, ("result",), "result")
    name = doc.get("command")
    if name not in COMMANDS:
        raise DocumentError(f"result: unknown command {name!r}")
    bound = doc.get("bound", DEFAULT_BOUND)
    inputs = doc.get("input")
    if not isinstance(inputs, dict):
        raise DocumentError("result: missing input section")
    fresh, _ = run_command(name, inputs, bound)
    if _normalize(fresh) != _normalize(doc):
        raise VerifyMismatch("recomputed result differs from the recorded one")
    if name == "analyze":
        _replay_witnesses(doc)
    if name == "integralize":
        from .pipeline import verify_integralization
        h = codec.hom_from_doc(_strip(inputs["hom"]))
        if not verify_integralization(integralize(h, min(bound, CROSS_CHECK_BOUND))):
            raise VerifyMismatch("integralization certificates do not re-check")
    if name == "exactify" and not doc["result"]["all_exact"]:
        raise VerifyMismatch("exactification left a non-exact chart")
    return f"verified: {name}"


# ---------------------------------------------------------------------------
# sampling

SAMPLES = {
    "monoid": lambda rng: {"kind": "monoid", **codec.monoid_to_doc(generators.sharp_monoid(rng))},
    "hom": lambda rng: {"kind": "hom", **codec.hom_to_doc(generators.saturated_hom(rng))},
    "local-hom": lambda rng: {"kind": "hom", **codec.hom_to_doc(generators.local_finite_hom(rng))},
    "exact-hom": lambda rng: {"kind": "hom", **codec.hom_to_doc(generators.exact_hom(rng))},
}


# ---------------------------------------------------------------------------
# entry point

def _parser():
    p = argparse.ArgumentParser(prog="logmod", description=__doc__.splitlines()[0] if __doc__ else None)
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND, help="Kato search bound (default 8)")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.add_argument("--seed", type=int, default=0, help="seed for 'sample' only")
    p.add_argument("--output", "-o", help="write the report to this file instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze").add_argument("hom")
    sp = sub.add_parser("pushout")
    sp.add_argument("hom")
    sp.add_argument("hom2")
    sp = sub.add_parser("blowup")
    sp.add_argument("monoid")
    sp.add_argument("ideal")
    sub.add_parser("exactify").add_argument("job")
    sub.add_parser("integralize").add_argument("hom")
    sp = sub.add_parser("fan")
    sp.add_argument("action", choices=("subdivide", "resolve", "check", "emit-geometry"))
    sp.add_argument("fan")
    sp.add_argument("pl", nargs="?")
    sub.add_parser("verify").add_argument("result")
    sp = sub.add_parser("sample")
    sp.add_argument("what", choices=sorted(SAMPLES))
    return p


def _output(args, text):
    target = args.output
    if target is None and os.environ.get("LOGMOD_OUTPUT_DIR"):
        name = args.command if args.command != "fan" else f"fan-{args.action}"
        target = str(Path(os.environ["LOGMOD_OUTPUT_DIR"]) / f"{name}.txt")
    if target:
        Path(target).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return INPUT_ERROR if e.code else OK
    render = emit if args.format == "text" else emit_machine
    try:
        if args.command == "verify":
            msg = verify_result(_read(args.result))
            _output(args, msg + "\n")
            return OK
        if args.command == "sample":
            _output(args, render(SAMPLES[args.what](random.Random(args.seed))))
            return OK
        name = args.command if args.command != "fan" else f"fan {args.action}"
        _, slots = COMMANDS[name]
        if args.command in ("analyze", "integralize"):
            paths = [args.hom]
        elif args.command == "pushout":
            paths = [args.hom, args.hom2]
        elif args.command == "blowup":
            paths = [args.monoid, args.ideal]
        elif args.command == "exactify":
            paths = [args.job]
        else:
            paths = [args.fan] + ([args.pl] if args.pl else [])
        if len(paths) != len(slots):
            raise DocumentError(f"{name}: expected {len(slots)} input file(s)")
        inputs = {}
        for (slot, kinds), path in zip(slots, paths):
            doc = _read(path)
            _expect_kind(doc, kinds, path)
            inputs[slot] = doc
        doc, code = run_command(name, inputs, args.bound)
        _output(args, render(doc))
        return code
    except VerifyMismatch as e:
        sys.stderr.write(f"verification failed: {e}\n")
        return NEGATIVE
    except INPUT_ERRORS as e:
        sys.stderr.write(f"error: {e}\n")
        return INPUT_ERROR
    except (CertificationError, AssertionError) as e:
        sys.stderr.write(f"internal assertion failed: {e}\n")
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
