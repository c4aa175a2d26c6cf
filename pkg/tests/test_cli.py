import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from reference_values import C_STAR_D1_L2, ELL0_L2, ELL_INF_L2
from roadkpp import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_speed_json(capsys):
    code, out, _ = run(capsys, "speed", "--D", "1", "--L", "2")
    assert code == 0
    res = json.loads(out)
    assert res["c_star"] == pytest.approx(C_STAR_D1_L2, rel=1e-9)
    assert res["family"] == "trig"
    assert res["params"]["L"] == 2.0


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"params": {"D": 8.0, "L": 3.0}, "reaction": "logistic"}))
    _, out, _ = run(capsys, "speed", "--config", str(cfg), "--L", "2")
    res = json.loads(out)
    assert res["params"]["D"] == 8.0 and res["params"]["L"] == 2.0


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"D": 1.0, "Dee": 2.0}))
    code, out, err = run(capsys, "speed", "--config", str(cfg))
    assert code == 2 and out == ""
    msg = json.loads(err)
    assert msg["error"] == "invalid-config" and "Dee" in msg["message"]


def test_invalid_parameter_exit_code(capsys):
    code, _, err = run(capsys, "speed", "--D", "-1")
    assert code == 2
    assert json.loads(err)["type"] == "InvalidParameterError"


def test_extinction_regime_exit_code(capsys):
    code, out, err = run(capsys, "speed", "--L", "1")
    assert code == 3 and out == ""
    assert "extinction regime" in json.loads(err)["message"]


def test_limits(capsys):
    code, out, _ = run(capsys, "limits", "--D", "8")
    assert code == 0
    res = json.loads(out)
    assert res["ell0"] == pytest.approx(ELL0_L2, rel=1e-8)
    assert res["ell_infinity"] == pytest.approx(ELL_INF_L2, rel=1e-8)
    assert res["c_kpp"] == pytest.approx(2.0)


def test_steady_profile_csv(tmp_path, capsys):
    out_csv = tmp_path / "v.csv"
    code, out, _ = run(capsys, "steady", "--n", "200", "--output", str(out_csv))
    assert code == 0
    res = json.loads(out)
    assert res["count"] == 1
    r = rows(out_csv.read_text())
    assert r[0] == ["y", "V"] and len(r) == 202
    assert float(r[-1][1]) == pytest.approx(res["roots"][0], rel=1e-9)
    code, _, _ = run(capsys, "steady", "--root-index", "5")
    assert code == 2


def test_sweep_D_monotone_and_columns(capsys):
    code, out, _ = run(capsys, "sweep", "--var", "D", "--from", "0.1", "--to", "20", "--points", "8")
    assert code == 0
    r = rows(out)
    assert r[0] == ["D", "c_star", "beta_star", "alpha_star", "family"]
    c = np.array([float(x[1]) for x in r[1:]])
    assert len(c) == 8 and np.all(np.diff(c) > 0)


def test_sweep_L_marks_extinction(capsys):
    _, out, _ = run(capsys, "sweep", "--var", "L", "--from", "1", "--to", "3", "--points", "3")
    r = rows(out)[1:]
    assert r[0][4] == "extinction" and r[0][1] == "nan"
    assert r[2][4] in ("trig", "hyperbolic")


def test_sweep_beta_curves(capsys):
    _, out, _ = run(capsys, "sweep", "--var", "beta", "--c", "1.5", "--from", "0.05", "--to", "1.5",
                    "--points", "10")
    r = rows(out)
    assert r[0] == ["family", "branch", "c", "beta", "alpha"]
    fams = {x[0] for x in r[1:]}
    assert {"road-trig", "field-trig"} <= fams
    code, _, _ = run(capsys, "sweep", "--var", "beta", "--from", "0", "--to", "1")
    assert code == 2


def test_sweep_workers_byte_identical(capsys, monkeypatch):
    argv = ("sweep", "--var", "D", "--from", "0.5", "--to", "10", "--points", "4")
    _, one, _ = run(capsys, *argv)
    monkeypatch.setenv(cli.WORKERS_ENV, "2")
    _, two, _ = run(capsys, *argv)
    assert one == two


def test_repeat_runs_byte_identical(capsys):
    outs = [run(capsys, "speed", "--D", "3", "--L", "4")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_verify_csv(capsys):
    code, out, _ = run(capsys, "verify", "--D", "0.5", "--fractions", "0.99,0.999")
    assert code == 0
    r = rows(out)
    assert r[0][:3] == ["fraction", "c", "beta_re"]
    im = [float(x[3]) for x in r[1:]]
    assert all(v > 0 for v in im) and im[1] < im[0]
    assert all(float(x[6]) < 1e-10 for x in r[1:])


def test_simulate_writes_three_files(tmp_path, capsys):
    pre = tmp_path / "run"
    code, out, _ = run(capsys, "simulate", "--T", "10", "--dx", "0.4", "--ny", "8", "--prefix", str(pre))
    assert code == 0
    res = json.loads(out)
    assert res["outcome"] in ("persistence", "undecided")
    assert rows((tmp_path / "run_front.csv").read_text())[0] == ["t", "x_right", "x_left", "sup_v"]
    assert rows((tmp_path / "run_field.csv").read_text())[0] == ["x", "y", "v"]
    assert rows((tmp_path / "run_road.csv").read_text())[0] == ["x", "u"]


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "roadkpp", "speed", "--L", "1"], capture_output=True, text=True)
    assert p.returncode == 3
    assert json.loads(p.stderr)["error"] == "regime"
