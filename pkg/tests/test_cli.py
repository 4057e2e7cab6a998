import json
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from logmod.cli import main
from logmod.textio import FormatError, emit, emit_machine, parse, parse_any

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

keys = st.from_regex(r"[a-z][a-z0-9_]{0,6}", fullmatch=True)
vectors = st.lists(st.integers(-50, 50), min_size=1, max_size=4).map(tuple)
scalars = st.one_of(
    st.integers(-10**6, 10**6), st.booleans(), st.none(), vectors,
    st.text(st.characters(codec="utf-8", exclude_categories=("Cs", "Cc")), max_size=12),
    st.lists(vectors, max_size=4),
)
records = st.recursive(
    st.dictionaries(keys, scalars, min_size=1, max_size=4),
    lambda inner: st.dictionaries(keys, st.one_of(scalars, inner, st.lists(inner, min_size=1, max_size=3)),
                                  min_size=1, max_size=4),
    max_leaves=12,
)


@settings(max_examples=200, deadline=None)
@given(records)
def test_text_round_trip(doc):
    text = emit(doc)
    assert parse(text) == doc
    assert emit(parse(text)) == text


@settings(max_examples=100, deadline=None)
@given(records)
def test_machine_round_trip(doc):
    out = emit_machine(doc)
    assert json.loads(out) is not None
    assert emit_machine(parse_any(out)) == out


@pytest.mark.parametrize("text, line", [
    ("kind = hom\nrank 2\n", 2),
    ("a = [1 x]\n", 1),
    ("a = 1\na = 2\n", 2),
    ("# c\n\nv += 3\n", 3),
    ("x.1 = 4\n", 1),
])
def test_format_errors_carry_positions(text, line):
    with pytest.raises(FormatError) as e:
        parse(text, "doc.txt")
    assert e.value.line == line
    assert f"doc.txt:{line}:" in str(e.value)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_identity(capsys):
    code, out, _ = run(capsys, "analyze", str(CORPUS / "identity.hom"))
    assert code == 0
    doc = parse(out)
    assert doc["result"]["exact"] is True and doc["result"]["integral_morphism"]["holds"] is True


def test_analyze_twisted_prints_witness(capsys):
    code, out, _ = run(capsys, "analyze", str(CORPUS / "twisted.hom"))
    assert code == 1
    doc = parse(out)
    assert doc["result"]["integral"]["verdict"] == "NotIntegral"
    w = doc["result"]["integral"]["witness"]
    assert (w["a1"], w["a2"], w["b1"], w["b2"]) == ((1, 0), (0, 1), (0, 0, 1), (1, 0, 0))


def test_integralize_and_verify(capsys, tmp_path):
    out_file = tmp_path / "res.txt"
    assert main(["--output", str(out_file), "integralize", str(CORPUS / "twisted.hom")]) == 0
    assert main(["verify", str(out_file)]) == 0
    assert capsys.readouterr().out.startswith("verified:")
    # tampering is caught
    text = out_file.read_text().replace("MiracleFlatness", "FreeModule", 1)
    out_file.write_text(text)
    assert main(["verify", str(out_file)]) != 0


def test_input_errors(capsys, tmp_path):
    bad = tmp_path / "bad.hom"
    bad.write_text("kind = hom\nsource.rank = 2\nsource.gens += [1 0 0]\n")
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 2 and "error" in err
    bad.write_text("kind = hom\nsource.rank 2\n")
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 2 and f"{bad}:2:" in err
    code, _, _ = run(capsys, "analyze", str(tmp_path / "missing.hom"))
    assert code == 2
    code, _, _ = run(capsys, "blowup", str(CORPUS / "twisted.hom"), str(CORPUS / "e1e2.ideal"))
    assert code == 2
    assert run(capsys, "no-such-command")[0] == 2


def test_formats_and_determinism(capsys):
    args = ["blowup", str(CORPUS / "n2.monoid"), str(CORPUS / "e1e2.ideal")]
    a = run(capsys, *args)
    b = run(capsys, *args)
    assert a == b and a[0] == 0
    m = run(capsys, "--format", "machine", *args)
    assert m[0] == 0
    assert parse_any(m[1]) == parse(a[1])


def test_fan_commands(capsys):
    assert run(capsys, "fan", "check", str(CORPUS / "two_quadrants.fan"))[0] == 0
    assert run(capsys, "fan", "check", str(CORPUS / "overlap.fan"))[0] == 1
    code, out, _ = run(capsys, "fan", "resolve", str(CORPUS / "hj5.fan"))
    assert code == 0 and len(parse(out)["result"]["fan"]["cones"]) == 5
    code, out, _ = run(capsys, "fan", "subdivide", str(CORPUS / "quadrant.fan"), str(CORPUS / "ord_e1e2.pl"))
    assert code == 0 and len(parse(out)["result"]["fan"]["cones"]) == 2


def test_sample_is_seeded(capsys):
    a = run(capsys, "--seed", "7", "sample", "hom")
    b = run(capsys, "--seed", "7", "sample", "hom")
    assert a == b and a[0] == 0


def test_output_dir_override(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("LOGMOD_OUTPUT_DIR", str(tmp_path))
    assert main(["analyze", str(CORPUS / "identity.hom")]) == 0
    assert (tmp_path / "analyze.txt").exists()


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "logmod.cli", "analyze", str(CORPUS / "doubling.hom")],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "kind = result" in r.stdout
