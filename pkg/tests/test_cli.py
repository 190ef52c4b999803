from __future__ import annotations

import json
import subprocess
import sys
from fractions import Fraction

import pytest

from cstark.cli import EXIT_INPUT, EXIT_OK, EXIT_UNKNOWN, run


def report(text: str) -> dict:
    return json.loads(text.split("\n---\n", 1)[1])


@pytest.fixture
def files(tmp_path):
    (tmp_path / "two.sn").write_text("2 inf\n")
    (tmp_path / "hard.sn").write_text("machine 0 never\nmachine 1 always\n")
    (tmp_path / "a.cert").write_text("dims powers 2\n")
    (tmp_path / "b.cert").write_text("dims powers 4\n")
    (tmp_path / "bad.sn").write_text("2 inf\n9 1\n")
    (tmp_path / "m2.pres").write_text("matrix 2\n")
    return tmp_path


def test_sn_parse_and_print(files):
    code, out = run(["sn", "parse", str(files / "two.sn"), "--stages", "5"])
    assert code == EXIT_OK
    assert report(out)["dims"] == [1, 2, 4, 8, 16]
    code, out = run(["sn", "print", str(files / "hard.sn"), "--stages", "4", "--primes", "2,3"])
    data = report(out)
    assert data["exponents 2"] == [0] * 4
    assert data["exponents 3"] == [0, 1, 2, 3]


def test_parse_error_is_positional(files):
    code, out = run(["sn", "parse", str(files / "bad.sn")])
    assert code == EXIT_INPUT
    assert "line 2, column 1" in out


def test_build(files):
    code, out = run(["build", "--cert", str(files / "a.cert"), "--stages", "4"])
    assert code == EXIT_OK and report(out)["dims"] == [1, 2, 4, 8]
    code, out = run(["build", "--sn", str(files / "two.sn"), "--stages", "3"])
    assert code == EXIT_OK


def test_norm_and_trace():
    code, out = run(["norm", "u(1,1,1) - u(2,1,1)", "-k", "12"])
    data = report(out)
    assert code == EXIT_OK
    assert Fraction(data["norm lo"]) <= 1 <= Fraction(data["norm hi"])
    code, out = run(["trace", "u(3,1,1)", "-k", "10"])
    data = report(out)
    assert Fraction(data["trace lo"]) <= Fraction(1, 8) <= Fraction(data["trace hi"])


def test_proj_classify():
    code, out = run(["proj", "classify", "u(2,1,1) + u(2,2,2)"])
    data = report(out)
    assert code == EXIT_OK and data["projection"] is True and data["trace"] == "1/2"
    code, out = run(["proj", "classify", "u(1,1,2)"])
    assert report(out)["projection"] is False


def test_k0_verbs():
    code, out = run(["k0", "rat", "[1]"])
    assert code == EXIT_OK and report(out)["value"] == "1"
    assert "value: 1\n" in out
    code, out = run(["k0", "eq", "[1]", "[1] + x0"])
    assert code == EXIT_OK and report(out)["equal"] is True
    code, out = run(["k0", "pos", "x0 - [1]"])
    assert code == EXIT_OK and report(out)["positive"] is False


def test_iso(files):
    code, out = run(["iso", "--a", str(files / "a.cert"), "--b", str(files / "b.cert"), "--pt", "1", "-k", "8"])
    data = report(out)
    assert code == EXIT_OK
    assert data["k"] == [0, 1, 2, 4, 6, 8, 10, 12]
    assert data["image"] == "1"
    code, out = run(["iso", "--a", str(files / "a.cert"), "--b", str(files / "b.cert"),
                     "--pt", "u(1,1,1)", "-k", "8"])
    assert report(out)["trace image"] == "1/2"


def test_extract_cert(files):
    code, out = run(["extract-cert", "--pres", str(files / "m2.pres"), "--stages", "3"])
    data = report(out)
    assert code == EXIT_OK and data["dims"] == [1, 2] and data["complete"] is True


def test_unknown_exit_code():
    code, out = run(["k0", "pos", "x9 - x2", "--fuel", "1"])
    assert code in (EXIT_OK, EXIT_UNKNOWN)
    if code == EXIT_UNKNOWN:
        assert "fuel" in report(out)


def test_determinism_and_module_entry():
    a = run(["trace", "u(2,1,3) + 1/3*u(1,2,2)", "-k", "9"])
    b = run(["trace", "u(2,1,3) + 1/3*u(1,2,2)", "-k", "9"])
    assert a == b
    proc = subprocess.run([sys.executable, "-m", "cstark", "trace", "u(2,1,3) + 1/3*u(1,2,2)", "-k", "9"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == a[1]
