import json

import pytest

from hyperbaker.cli import ParseError, ValidationError, main, parse_curve_data, parse_curve_input

G1 = {"genus": 1, "nu": ["1", "0", "0", "0", "-1"], "branch_point": "1"}


@pytest.fixture
def g1_file(tmp_path):
    p = tmp_path / "g1.json"
    p.write_text(json.dumps(G1))
    return p


def test_parse_valid_curve(g1_file):
    curve, scaling = parse_curve_input(g1_file)
    assert curve.genus == 1 and curve.a == 1 and scaling is None


def test_parse_errors(tmp_path):
    with pytest.raises(ParseError):
        parse_curve_data({"genus": 1, "nu": ["1", "0", "0", "-1"], "branch_point": "1"})
    with pytest.raises(ParseError):
        parse_curve_data({"genus": 1, "nu": ["1", "0", "0", "0", "-1"]})
    with pytest.raises(ValidationError, match="Nu0Zero"):
        parse_curve_data({"genus": 1, "nu": ["0", "1", "0", "0", "-1"], "branch_point": "1"})
    with pytest.raises(ValidationError):
        parse_curve_data(dict(G1, scaling={"s": "1", "t": "1"}))
    bad = tmp_path / "bad.json"
    bad.write_text('{"genus": 1,\n "nu": [1, 2,,]}')
    with pytest.raises(ParseError, match=":2:"):
        parse_curve_input(bad)


def test_complex_and_indexed_branch_point():
    curve, _ = parse_curve_data({"genus": 1, "nu": ["1", "0", "0", "0", "-1"], "branch_point": [0, 1]})
    assert abs(complex(curve.a) - 1j) < 1e-12
    curve, _ = parse_curve_data({"genus": 1, "nu": ["1", "0", "0", "0", "-1"], "branch_point": {"index": 3}})
    assert abs(complex(curve.a) - 1) < 1e-12


def test_exit_codes(g1_file, tmp_path, capsys):
    assert main(["verify", "--curve", str(g1_file), "--suite", "algebraic", "--tolerance", "x=-1"]) == 2
    assert main(["verify", "--curve", str(tmp_path / "missing.json"), "--suite", "algebraic"]) == 2
    assert main(["nonsense"]) == 2
    assert main(["verify", "--genus", "1", "--suite", "algebraic", "--divisors", "3"]) == 0
    capsys.readouterr()


def test_failing_check_sets_exit_code(g1_file, tmp_path, capsys):
    rep = tmp_path / "r.json"
    code = main(["verify", "--curve", str(g1_file), "--suite", "h-identities", "--report", str(rep)])
    data = json.loads(rep.read_text())
    failed = [c for c in data["checks"] if not c["pass"]]
    assert code == (1 if failed else 0)
    for c in failed:
        assert c["measured"] is not None or c["error"]


def test_reports_are_byte_identical(g1_file, tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        main(["verify", "--curve", str(g1_file), "--suite", "periods", "--seed", "3", "--report", str(p)])
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(a.read_text())
    assert data["suite"] == "periods" and len(data["curve_fingerprint"]) == 64
    rec = data["checks"][0]
    assert set(rec) >= {"name", "reference", "measured", "tolerance", "pass"}


def test_subcommands(g1_file, tmp_path, capsys):
    assert main(["baker", "--curve", str(g1_file), "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert "P_2,2" in out["baker"]
    assert main(["omega", "--genus", "1", "--symbolic", "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["Omega"][0][0]
    assert main(["expand", "--curve", str(g1_file), "--order", "7", "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["coefficients"]["1"] == "1"
    pts = tmp_path / "pts.json"
    pts.write_text(json.dumps([{"x": "2", "sheet": 1}]))
    assert main(["baker", "--curve", str(g1_file), "--points", str(pts), "--format", "json"]) == 0
    capsys.readouterr()
    rep = tmp_path / "p.json"
    assert main(["periods", "--curve", str(g1_file), "--report", str(rep)]) == 0
    assert "tau" in json.loads(rep.read_text())
    assert main(["expand", "--genus", "2"]) == 2
