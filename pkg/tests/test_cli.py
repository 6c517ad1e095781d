import json

import numpy as np
import pytest

from isolab.cli import main


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


@pytest.fixture
def flat(tmp_path):
    return _write(tmp_path / "flat.txt", "family = constant\nparams = [0]\nh0 = 0\n")


@pytest.fixture
def gauss(tmp_path):
    return _write(tmp_path / "gauss.txt", "# h = t^2\nfamily = power\nparams = [1, 2]\nh0 = 0\n")


def test_profile_csv_and_json(flat, capsys):
    assert main(["profile", "--density", flat, "--v", "3.141592653589793"]) == 0
    out = capsys.readouterr().out.splitlines()
    row = dict(zip(out[0].split(","), out[1].split(",")))
    assert row["I_f"] == "6.283185307179586"
    assert main(["profile", "--density", flat, "--v", "3.141592653589793", "--format", "json"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["r"] == pytest.approx(1.0, abs=1e-15)


def test_profile_writes_file_and_summary(gauss, tmp_path):
    out, summ = tmp_path / "p.csv", tmp_path / "s.json"
    assert main(["profile", "--density", gauss, "--v", "2", "--out", str(out), "--summary", str(summ)]) == 0
    assert out.read_text().startswith("v,r,I_f")
    assert json.loads(summ.read_text())["v"] == 2.0


def test_input_errors_exit_2(flat, tmp_path, capsys):
    assert main(["profile", "--density", flat, "--v", "-1"]) == 2
    assert main(["profile", "--density", flat]) == 2
    assert main(["profile", "--density", str(tmp_path / "missing.txt"), "--v", "1"]) == 2
    bad = _write(tmp_path / "bad.txt", "family = constant\nparams = [0\n")
    assert main(["profile", "--density", bad, "--v", "1"]) == 2
    assert main(["ode", "--density", flat, "--a", "3", "--b", "1"]) == 2
    assert main(["ode", "--density", flat, "--b", "1"]) == 2
    assert main(["verify", "--suite", "nonsense"]) == 2
    assert main(["symmetrize", "--density", flat, "--raster", "x.npy"]) == 2
    capsys.readouterr()


def test_ode_csv_comment_and_exit_codes(flat, capsys):
    assert main(["ode", "--density", flat, "--a", "1", "--b", "3", "--points", "11"]) == 0
    text = capsys.readouterr().out
    first, header = text.splitlines()[:2]
    assert first.startswith("# lam=")
    assert "residual_max=" in first and "tol=1e-07" in first
    assert header == "t,u,residual"
    assert len(text.splitlines()) == 13
    # an unreachable tolerance is a verification failure
    assert main(["ode", "--density", flat, "--a", "1", "--b", "3", "--tol", "1e-300"]) == 1
    assert "FAIL linear-residual" in capsys.readouterr().err


@pytest.mark.parametrize("eta, label", [("riccati", "w"), ("origin", "u"), ("-1,1", "u")])
def test_ode_variants(gauss, eta, label, capsys):
    # a leading minus needs the --eta=VALUE form
    args = ["ode", "--density", gauss, "--b", "2", f"--eta={eta}", "--format", "json"]
    if eta != "origin":
        args += ["--a", "1"]
    assert main(args) == 0
    rec = json.loads(capsys.readouterr().out)
    assert len(rec[label]) == 201
    assert rec["residual_max"] <= 1e-7


def test_compete_and_trace(gauss, tmp_path, capsys):
    tr = tmp_path / "trace.csv"
    args = ["compete", "--density", gauss, "--v", "4", "--N", "2", "--trials", "3", "--format", "json",
            "--trace", str(tr)]
    assert main(args) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["passed"] and rec["N"] == 2 and rec["gap"] >= -1e-7
    assert tr.read_text().startswith("eval,a0,a1,a2,a3,a4,a5,perimeter,gap")


def test_verify_is_byte_identical(tmp_path, capsys):
    outs = []
    for k in range(2):
        p = tmp_path / f"v{k}.csv"
        assert main(["verify", "--suite", "bvp", "--trials", "3", "--out", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    assert "PASS suite=bvp" in capsys.readouterr().err
    assert main(["verify", "--suite", "hermite", "--trials", "5", "--seed", "3", "--format", "json"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert json.loads(lines[-1])["passed"] is True


def test_verify_with_density_interval(flat, gauss, capsys):
    assert main(["verify", "--suite", "riccati", "--density", flat, "--a", "1", "--b", "2"]) == 0
    # rho = 2t on [1, 2] breaks w > 1: an input error, not a failed check
    assert main(["verify", "--suite", "riccati", "--density", gauss, "--a", "1", "--b", "2"]) == 2
    assert "w > 1 fails" in capsys.readouterr().err
    assert main(["verify", "--suite", "riccati", "--a", "1", "--b", "2"]) == 2


def test_symmetrize_shape_and_raster(gauss, tmp_path, capsys):
    comps = [{"kind": "offcenter", "center": [1.0, 0.0], "r": 0.4}, {"kind": "offcenter", "center": [-1.0, 0.0], "r": 0.4}]
    shape = _write(tmp_path / "two.json", json.dumps(comps))
    assert main(["symmetrize", "--density", gauss, "--shape", shape, "--format", "json"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["passed"] and rec["perimeter_after"] < rec["perimeter_before"]
    c = (np.arange(121) - 60) * 0.02
    X, Y = np.meshgrid(c, c)
    grid = tmp_path / "mask.npy"
    np.save(grid, ((X - 0.5) ** 2 + Y**2 <= 0.16).astype(np.uint8))
    assert main(["symmetrize", "--density", gauss, "--raster", str(grid), "--cell", "0.02"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("# perimeter_before=") and "passed=true" in lines[0]
    assert lines[1] == "tau,L_left,L_right"
