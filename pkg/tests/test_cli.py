import json
import subprocess
import sys

import mpmath
import pytest

from zetabound import cli
from zetabound import constants as C
from zetabound import curves as K
from zetabound.errors import NoRootError, PrecisionEscalationError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_constants_all_json(capsys):
    code, out, _ = run(capsys, "constants", "--which", "all", "--digits", "20")
    assert code == 0
    d = json.loads(out)
    assert d["config"]["digits"] == 20 and d["command"] == "constants"
    assert d["constants"]["sigma1"]["value"].startswith("1.94010168374362528")
    assert d["constants"]["E"]["value"].startswith("2.81301402025289836")
    assert d["constants"]["A"]["value"].startswith("1.19234733718619320")
    _, again, _ = run(capsys, "constants", "--which", "all", "--digits", "20")
    assert again == out


@pytest.mark.parametrize("digits", ["9", "201", "x"])
def test_digits_range_is_usage_error(capsys, digits):
    with pytest.raises(SystemExit) as exc:
        cli.main(["constants", "--digits", digits])
    assert exc.value.code == 2


def test_sigma_a_one_redirects(capsys):
    code, _, err = run(capsys, "sigma-a", "--a", "1")
    assert code == 2 and "sigma1" in err


def test_sigma_a_values_against_findroot(capsys):
    for a, f in (("2", lambda x: mpmath.zeta(x) - 2), ("1/2", lambda x: mpmath.zeta(2 * x) / mpmath.zeta(x) - 0.5)):
        code, out, _ = run(capsys, "sigma-a", "--a", a, "--digits", "25")
        assert code == 0
        with mpmath.workdps(40):
            oracle = mpmath.findroot(f, 1.6)
            assert abs(mpmath.mpf(json.loads(out)["sigma_a"]["value"]) - oracle) < 1e-24


def test_sigma_a_nonpositive_is_usage_error(capsys):
    code, _, err = run(capsys, "sigma-a", "--a", "-1")
    assert code == 2 and "positive" in err


def test_l_bound_q1_is_sigma_one(capsys):
    code, out, _ = run(capsys, "l-bound", "--q", "1", "--digits", "20")
    assert code == 0
    assert json.loads(out)["l_bound"]["value"].startswith("1.94010168374362528")


def test_text_format(capsys):
    code, out, _ = run(capsys, "l-bound", "--q", "4", "--format", "text")
    assert code == 0 and "value: 1.8877909267" in out


def test_search_height_is_byte_identical(capsys, tmp_path):
    argv = ["search-height", "--n", "3", "--nu", "20", "--r", "5", "--no-refine"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    target = tmp_path / "out.json"
    assert cli.main(argv + ["--out", str(target)]) == 0
    again = tmp_path / "again.json"
    cli.main(argv + ["--out", str(again)])
    assert target.read_bytes() == again.read_bytes()
    assert json.loads(target.read_text())["candidates"] == json.loads(first)["candidates"]
    d = json.loads(first)
    assert d["config"]["nu"] == 20 and all(isinstance(v, str) for v in d["diagnostics"].values())


def test_search_height_theta_flag(capsys):
    code, out, _ = run(capsys, "search-height", "--n", "3", "--nu", "20", "--r", "5", "--theta", "pi,0,0", "--no-refine")
    assert code == 0 and json.loads(out)["config"]["theta"] == "pi,0,0"


def test_trace_formats(capsys, tmp_path):
    window = "1.2,3,1,15"
    code, out, _ = run(capsys, "trace", "--window", "0.5,2,10,30", "--heavy", "--overlay-re-zero")
    assert code == 0
    d = json.loads(out)
    assert d["segments"] and d["re_zero_segments"]
    assert {s["kind"] for s in d["segments"]} <= set(K.KINDS)
    code, out, _ = run(capsys, "trace", "--window", window, "--format", "csv")
    assert code == 0 and out.startswith("# kind=") and "sigma,t" in out
    code, _, _ = run(capsys, "trace", "--window", window, "--format", "csv", "--out", str(tmp_path / "csv"))
    assert code == 0 and (tmp_path / "csv" / "segment_000.csv").exists()
    code, out, _ = run(capsys, "trace", "--window", window, "--format", "svg")
    assert code == 0 and out.startswith("<svg")


def test_trace_turning_points_respect_E(capsys):
    code, out, _ = run(capsys, "trace", "--window", "1.2,3,1,50", "--turning-points")
    d = json.loads(out)
    assert code == 0 and len(d["turning_points"]) == 2
    assert d["turning_bound"]["falsified"] is False


def test_trace_bad_window(capsys):
    code, _, err = run(capsys, "trace", "--window", "3,1,1,5")
    assert code == 2 and err
    code, _, _ = run(capsys, "trace", "--window", "0.5,1,1,5")
    assert code == 2


def test_check_suites(capsys):
    code, out, _ = run(capsys, "check", "--suite", "series-oracles")
    assert code == 0
    rows = json.loads(out)["series-oracles"]
    assert len(rows) == 6 and all(r["ok"] for r in rows)
    code, out, _ = run(capsys, "check", "--suite", "a3", "--grid", "20")
    assert code == 0 and json.loads(out)["a3"]["violations"] == []


def test_exit_codes(capsys, monkeypatch):
    def escalate(digits):
        raise PrecisionEscalationError("sign not certified", 60)

    def no_root(digits):
        raise NoRootError("no bracket")

    monkeypatch.setitem(cli._SOLVERS, "E", escalate)
    code, _, err = run(capsys, "constants", "--which", "E")
    assert code == 3 and "60" in err
    monkeypatch.setitem(cli._SOLVERS, "E", no_root)
    assert run(capsys, "constants", "--which", "E")[0] == 4
    monkeypatch.setattr(K, "check_u_bound", lambda: [{"t": 1.0, "u": "3", "u_minus_E": "0.2", "ok": False}])
    assert run(capsys, "check", "--suite", "u-bound")[0] == 5


def test_constants_wide_enclosure_fails(capsys, monkeypatch):
    real = C.solve_A

    def loose(digits):
        r = real(digits)
        return C.CertifiedRoot(r.value, mpmath.mpf(10) ** (-digits + 3), r.bracket, r.residual, r.digits, r.name)

    monkeypatch.setitem(cli._SOLVERS, "A", loose)
    assert run(capsys, "constants", "--which", "A", "--digits", "15")[0] == 3


def test_help_documents_units():
    parser = cli.build_parser()
    assert "dimensionless" in parser.format_help()
    for cmd in ("constants", "sigma-a", "l-bound", "search-height", "trace", "check"):
        proc = subprocess.run([sys.executable, "-m", "zetabound", cmd, "--help"], capture_output=True, text=True)
        assert proc.returncode == 0
        assert "dimensionless" in proc.stdout and "decimal digits" in proc.stdout
