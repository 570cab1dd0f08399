import json
import subprocess
import sys
from importlib import resources

import pytest

from symsq import cli, suites
from symsq.quadrature import QuadratureError

T11 = str(resources.files("symsq") / "data" / "11.2.a.a.txt")


def test_gauss_exit_ok(tmp_path):
    out = tmp_path / "g.csv"
    assert cli.run(["--suite", "verify-gauss", "--param", "c_max=64", "--out", str(out)]) == 0
    text = out.read_text()
    assert "gauss.closed" in text


def test_json_format(capsys):
    assert cli.run(["--suite", "stationary-phase", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert "sp.slope0" in json.dumps(data)


def test_sieve_byte_identical(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        code = cli.run(["--suite", "sieve-check", "--seed", "7", "--param", "count=20",
                        "--param", "grid=((64, 64),)", "--out", str(p)])
        assert code == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_seed_changes_sieve(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["--suite", "sieve-check", "--param", "count=20", "--param", "grid=((64, 64),)"]
    cli.run(base + ["--seed", "1", "--out", str(a)])
    cli.run(base + ["--seed", "2", "--out", str(b)])
    assert a.read_bytes() != b.read_bytes()


def test_coeff_file_path(capsys):
    assert cli.run(["--suite", "eval-L", "--coeff-file", T11]) == 0
    assert "L.euler" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["--suite", "eval-L", "--coeff-file", "/nonexistent/table.txt"],
    ["--suite", "verify-gauss", "--coeff-file", T11],
    ["--suite", "verify-gauss", "--param", "bogus=1"],
    ["--suite", "verify-gauss", "--param", "noequals"],
    ["--suite", "verify-gauss", "--tolerance", "tol=-1"],
    ["--suite", "verify-gauss", "--tolerance", "tol=abc"],
    ["--suite", "no-such-suite"],
    [],
])
def test_usage_errors(argv):
    assert cli.run(argv) == 2


def test_malformed_coeff_file(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("# level=11\n# weight=2\n# normalization=deligne\n1 1.0\n3 0.5\n")
    assert cli.run(["--suite", "eval-L", "--coeff-file", str(bad)]) == 2


def test_failed_check_exit_1(capsys):
    # an impossible runtime limit forces one failing row
    assert cli.run(["--suite", "verify-gauss", "--param", "c_max=16", "--param", "runtime=1e-9"]) == 1


def test_quadrature_error_exit_3(monkeypatch):
    def boom(**_):
        raise QuadratureError("no convergence", estimates=[])
    monkeypatch.setitem(suites.SUITES, "stationary-phase", suites.Suite(boom))
    assert cli.run(["--suite", "stationary-phase"]) == 3


def test_console_entry():
    res = subprocess.run([sys.executable, "-m", "symsq.cli", "--suite", "stationary-phase"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "sp.order0" in res.stdout
