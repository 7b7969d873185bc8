import json
import subprocess
import sys

import pytest

from sharpmpec import cli
from sharpmpec.errors import NonRationalLiteral, ParseError, ShapeError
from sharpmpec.io import (
    bundled_path,
    certificate_from_dict,
    certificate_to_dict,
    parse_certificate,
    parse_problem,
    parse_scalar,
    problem_from_dict,
    problem_to_dict,
)

EX1 = str(bundled_path("example1.json"))
EX2 = str(bundled_path("example2.json"))
CERT1 = str(bundled_path("example1_cert.json"))


def run(*argv):
    return cli.main(list(argv))


# -- parsing ---------------------------------------------------------------------------------

def test_scalars():
    assert parse_scalar("3/4", "x") == parse_scalar(" 3/4 ", "x")
    assert parse_scalar(-2, "x") == -2
    with pytest.raises(NonRationalLiteral):
        parse_scalar(0.5, "x")
    with pytest.raises(NonRationalLiteral):
        parse_scalar("0.5", "x")
    with pytest.raises(NonRationalLiteral):
        parse_scalar(True, "x")
    with pytest.raises(ParseError):
        parse_scalar(None, "x")


def test_float_in_problem_file_rejected(tmp_path):
    doc = json.loads(open(EX2).read())
    doc["grad_F"][0] = 0.5
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(NonRationalLiteral):
        parse_problem(path)
    assert run("analyze", str(path)) == cli.EXIT_INPUT


def test_shape_errors():
    doc = json.loads(open(EX2).read())
    doc["jac_g"] = doc["jac_g"][:2]
    with pytest.raises(ShapeError):
        problem_from_dict(doc)
    doc = json.loads(open(EX2).read())
    doc["jac_phi"][0] = [1, 2]
    with pytest.raises(ShapeError):
        problem_from_dict(doc)


def test_malformed_files(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        parse_problem(bad)
    with pytest.raises(ParseError):
        parse_problem(tmp_path / "missing.json")
    assert run("analyze", str(bad)) == cli.EXIT_INPUT


def test_problem_round_trip():
    for path in (EX1, EX2):
        data, _ = parse_problem(path)
        assert problem_from_dict(problem_to_dict(data)) == data


def test_certificate_round_trip_and_one_based_indices():
    cert = parse_certificate(CERT1)
    assert cert.I == frozenset({0, 1})
    doc = certificate_to_dict(cert)
    assert doc["I"] == [1, 2]
    assert certificate_from_dict(doc) == cert


def test_zero_index_rejected():
    doc = json.loads(open(CERT1).read())
    doc["I"] = [0, 1]
    with pytest.raises(ParseError):
        certificate_from_dict(doc)


# -- command line ------------------------------------------------------------------------------

@pytest.mark.parametrize("argv, code", [
    (("analyze", EX1), 0),
    (("analyze", EX2), 0),
    (("directional", EX1, "--v", "1,1,0"), 0),
    (("verify-sharp", EX1, "--cert", CERT1), 0),
    (("search-sharp", EX1), 0),
    (("search-mstat", EX2), 0),
    (("corollary-unique", EX1), 2),
    (("corollary-unique", EX2), 0),
    (("mscq-check", EX2), 0),
    (("probe-polyhedral", EX1, "--v", "1,1,0", "--vstar", "0,0,0"), 0),
    (("probe-polyhedral", EX1, "--v", "1,0,0", "--vstar", "0,0,1"), 1),
    (("probe-polyhedral", EX1, "--v", "1,1,0"), 3),
    (("directional", EX1, "--v", "1,1"), 3),
    (("directional", EX1, "--v", "0.5,1,0"), 3),
    (("bogus", EX1), 3),
])
def test_exit_codes(argv, code, capsys):
    assert run(*argv) == code


def test_wrong_certificate_fails(tmp_path):
    doc = json.loads(open(CERT1).read())
    doc["w"] = [1, 0, 0]
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    assert run("verify-sharp", EX1, "--cert", str(path)) == cli.EXIT_FAIL


def test_json_report(capsys):
    assert run("verify-sharp", EX1, "--cert", CERT1, "--json") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["verdict"] == "pass" and out["exit_code"] == 0
    assert {c["id"] for c in out["conditions"]} >= set("abcdefghijklmn")


def test_json_mstat_listing(capsys):
    run("search-mstat", EX2, "--json")
    out = json.loads(capsys.readouterr().out)
    ws = {tuple(c["w"]) for c in out["certificates"]}
    assert ws == {(0, 1), ("1/2", "1/2")}


def test_text_report(capsys):
    run("analyze", EX1)
    text = capsys.readouterr().out
    assert "critical cone" in text.lower()


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "sharpmpec", "search-mstat", EX2],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip()


def test_console_script():
    out = subprocess.run(["sharpmpec", "analyze", EX2, "--json"], capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["command"] == "analyze"
