import io
import json
import os
import subprocess
import sys

import pytest

from darboux import cli
from darboux.errors import UsageError


def _run(argv):
    buf = io.StringIO()
    code = cli.run(cli.parse_args(argv), stdout=buf)
    return code, buf.getvalue()


def test_parse_defaults():
    cmd = cli.parse_args(["verify-algebra", "--model", "free", "--samples", "1000"])
    assert (cmd.name, cmd.model, cmd.seed, cmd.samples) == ("verify-algebra", "Free", 42, 1000)


def test_parse_trace():
    cmd = cli.parse_args(["trace", "--model", "p3", "--param", "a=1", "--h", "1e-3", "--T", "10"])
    assert cmd.model_spec().params == (1.0,)
    assert (cmd.h, cmd.T) == (1e-3, 10.0)


@pytest.mark.parametrize("argv,flag", [
    (["spectrum", "--model", "p1", "--param", "b1=-1"], "--param"),
    (["trace", "--model", "p3"], "--param"),
    (["trace", "--model", "p3", "--param", "a"], "--param"),
    (["trace", "--model", "p3", "--param", "b=1"], "--param b"),
    (["trace", "--model", "p3", "--param", "a=x"], "--param a"),
    (["trace", "--h", "0"], "--h"),
    (["trace", "--state", "1,2"], "--state"),
    (["embed", "--nu", "1"], "--nu"),
    (["bogus"], "command"),
    (["spectrum", "--model", "free"], "--model"),
])
def test_usage_errors_name_the_flag(argv, flag):
    with pytest.raises(UsageError) as err:
        cli.parse_args(argv)
    assert flag in str(err.value)


def test_main_exit_codes(capsys, tmp_path):
    assert cli.main(["trace", "--model", "p3"]) == cli.EXIT_USAGE
    assert cli.main(["spectrum", "--model", "p1", "--param", "b1=-1", "--param", "b2=0",
                     "--param", "b3=0.1"]) == cli.EXIT_NUMERIC
    assert cli.main(["hj-check", "--out", str(tmp_path / "missing" / "x.json")]) == cli.EXIT_IO
    assert cli.main(["hj-check"]) == cli.EXIT_OK
    err = capsys.readouterr().err
    assert "usage error" in err and "numeric failure" in err and "i/o error" in err


def test_verification_failure_exit_code():
    # the literal published coefficients do not close, so counting them fails the run
    code, out = _run(["verify-quantum", "--model", "free", "--printed"])
    assert code == cli.EXIT_FAIL
    assert json.loads(out)["passed"] is False


def test_verify_algebra_free_report():
    code, out = _run(["verify-algebra", "--model", "free", "--samples", "200"])
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert len(rep["relations"]) == 4
    assert rep["oracle"]["tolerance"] == 1e-6


def test_trace_csv_artifact(tmp_path):
    path = tmp_path / "traj.csv"
    code, out = _run(["trace", "--model", "p3", "--param", "a=1", "--h", "1e-2", "--T", "0.1",
                      "--format", "csv", "--out", str(path)])
    lines = path.read_text().splitlines()
    assert lines[0] == "t,u,v,pu,pv" and len(lines) == 12
    assert json.loads(out)["steps"] == 10


def test_embed_mesh_artifact(tmp_path):
    path = tmp_path / "m.obj"
    code, out = _run(["embed", "--which", "lorentzian", "--nu", "3", "--nv", "3", "--out", str(path)])
    rep = json.loads(out)
    assert code == 0 and rep["max_metric_residual"] <= 1e-6
    assert path.read_text().count("\nv ") == 9


def test_report_written_to_out(tmp_path):
    path = tmp_path / "r.json"
    code, out = _run(["hj-check", "--out", str(path)])
    assert path.read_text() == out


def test_determinism_byte_identical():
    a = _run(["verify-algebra", "--model", "p2", "--param", "a1=0.5", "--param", "a2=0.3",
              "--param", "a3=0.2", "--samples", "300", "--seed", "7"])[1]
    b = _run(["verify-algebra", "--model", "p2", "--param", "a1=0.5", "--param", "a2=0.3",
              "--param", "a3=0.2", "--samples", "300", "--seed", "7"])[1]
    assert a == b


def test_dumps_format():
    text = cli.dumps({"b": 0.1, "a": [1, float("nan"), True, None, "x"]})
    assert text == '{\n  "a": [\n    1,\n    null,\n    true,\n    null,\n    "x"\n  ],\n  "b": 0.10000000000000001\n}'
    assert json.loads(text)["b"] == 0.1


def test_module_entry_point_and_logging():
    env = dict(os.environ, DARBOUX_LOG="info")
    res = subprocess.run([sys.executable, "-m", "darboux", "hj-check"], env=env,
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["passed"] is True
    assert "hj-check finished" in res.stderr
    env["DARBOUX_LOG"] = "quiet"
    res = subprocess.run([sys.executable, "-m", "darboux", "hj-check"], env=env,
                         capture_output=True, text=True)
    assert res.stderr == ""
