import csv
import io
import os
import subprocess
import sys

import pytest

from adkit.bench import BenchmarkRecord
from adkit.cli import build_parser, main, parse_args


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def cli(*argv, env=None):
    e = dict(os.environ)
    e.update(env or {})
    return subprocess.run([sys.executable, "-m", "adkit", *argv], capture_output=True, text=True, env=e)


def test_parse_examples():
    a = parse_args(["grad", "--fn", "example", "--mode", "reverse", "--at", "2,5"])
    assert (a.command, a.fn, a.mode, a.at) == ("grad", "example", "reverse", [2.0, 5.0])
    e = parse_args(["errcurve", "--x0", "0.2"])
    assert (e.x0, e.hmin, e.hmax, e.points) == (0.2, 1e-14, 1e-1, 100)


@pytest.mark.parametrize(
    "argv",
    [
        ["grad", "--fn", "example", "--at", "2"],
        ["grad", "--fn", "example", "--at", "2,x"],
        ["grad", "--fn", "example", "--bogus"],
        ["grad", "--fn", "nope", "--at", "1"],
        ["hvp", "--fn", "example", "--at", "2,5", "--v", "1"],
        ["helmholtz", "--reps", "0"],
        ["errcurve", "--hmin", "1", "--hmax", "0.1"],
        ["demo", "gd", "--fn", "quadratic", "--at", "1,2"],
        [],
    ],
)
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        parse_args(argv)
    assert exc.value.code == 2


@pytest.mark.parametrize("mode", ["forward", "reverse"])
def test_grad_example(capsys, mode):
    code, out, _ = run(["grad", "--fn", "example", "--mode", mode, "--at", "2,5"], capsys)
    assert code == 0
    assert out == "y=11.6520714552\ngrad=5.5,1.71633781454\n"


def test_grad_numeric(capsys):
    code, out, _ = run(["grad", "--fn", "example", "--mode", "numeric", "--h", "1e-6", "--at", "2,5"], capsys)
    lines = dict(l.split("=") for l in out.split())
    g = [float(v) for v in lines["grad"].split(",")]
    assert code == 0 and abs(g[0] - 5.5) < 1e-5 and abs(g[1] - 1.7163378145) < 1e-5


def test_domain_error_exits_1(capsys):
    code, out, err = run(["grad", "--fn", "example", "--at", "-1,5"], capsys)
    assert code == 1 and out == "" and "ln" in err


def test_jacobian_and_hvp(capsys):
    _, out, _ = run(["jacobian", "--fn", "rosenbrock", "--mode", "forward", "--at", "1,1"], capsys)
    assert out == "row0=0,0\n"
    _, out, _ = run(["hvp", "--fn", "rosenbrock", "--at", "1,1", "--v", "1,0"], capsys)
    assert out == "hvp=802,-400\n"
    _, out, _ = run(["grad", "--fn", "helmholtz", "--n", "3"], capsys)
    assert out.startswith("y=") and out.count(",") == 2


def test_errcurve_csv(capsys, tmp_path):
    code, out, _ = run(["errcurve", "--points", "5"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["h", "e_forward", "e_center"] and len(rows) == 6
    assert "\r" not in out
    path = tmp_path / "e.csv"
    run(["errcurve", "--points", "5", "--out", str(path)], capsys)
    assert path.read_bytes() == out.encode()


def test_helmholtz_csv_schema(capsys):
    code, out, _ = run(["helmholtz", "--n-list", "1,2", "--reps", "2", "--no-time"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == BenchmarkRecord.columns()
    assert [r[0] for r in rows[1:]] == ["1", "2"]
    timing = [BenchmarkRecord.columns().index(c) for c in BenchmarkRecord.TIMING]
    assert all(rows[k][i] == "0.0" for k in (1, 2) for i in timing)
    assert all(float(r[-1]) > 1 for r in rows[1:])


def test_demos(capsys):
    code, out, _ = run(["demo", "newton", "--fn", "quadratic"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["iter", "f", "grad_norm"] and float(rows[2][2]) < 1e-10
    code, out, _ = run(["demo", "mlp", "--iters", "10"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["epoch", "loss"] and len(rows) == 12
    code, out, _ = run(["demo", "gd", "--iters", "3", "--mode", "forward"], capsys)
    assert len(out.splitlines()) == 5


def test_help_documents_defaults():
    p = build_parser()
    sub = {a.dest: a for a in p._actions}["command"].choices
    assert set(sub) == {"grad", "jacobian", "hvp", "errcurve", "helmholtz", "demo"}
    texts = {k: v.format_help() for k, v in sub.items()}
    assert "default: 0.2" in texts["errcurve"] and "default: 1e-14" in texts["errcurve"]
    assert "default: 1000" in texts["helmholtz"] and "1, 8, 15, 22, 29, 36, 43, 50" in texts["helmholtz"]
    assert "default: 42" in texts["helmholtz"] and "default: reverse" in texts["grad"]


def test_subprocess_help_and_codes():
    r = cli("helmholtz", "--help")
    assert r.returncode == 0 and "--no-time" in r.stdout
    assert cli("grad", "--fn", "example", "--at", "2").returncode == 2
    assert cli("grad", "--fn", "example", "--at", "0,5").returncode == 1


def test_seed_environment_override():
    a = cli("grad", "--fn", "helmholtz", "--n", "3", env={"ADKIT_SEED": "5"}).stdout
    b = cli("grad", "--fn", "helmholtz", "--n", "3", "--seed", "5").stdout
    c = cli("grad", "--fn", "helmholtz", "--n", "3", env={"ADKIT_SEED": "42"}).stdout
    assert a == b != c
