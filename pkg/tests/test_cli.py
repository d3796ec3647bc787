import json
from pathlib import Path

import pytest

from hitchin_lab.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(tmp_path, *argv, sub="out"):
    out = tmp_path / sub
    code = main([*argv, "--out", str(out), "--quiet"])
    return code, out


def test_solve_torus(tmp_path):
    code, out = run(tmp_path, "solve", "--config", str(CONFIGS / "torus16.json"))
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["solver"]["residual_inf"] <= 1e-10
    assert (out / "solution.csv").read_text().splitlines()[0] == "x,y,psi1,psi2"
    assert (out / "background.csv").read_text().splitlines()[:3] == ["kind,h,nx,ny", "torus,0.015625,64,64",
                                                                       "x,y,sigma,kappa"]


def test_bad_config_exits_2(tmp_path, capsys):
    code, _ = run(tmp_path, "solve", "--config", str(CONFIGS / "bad.json"))
    assert code == 2
    assert "domain/n" in capsys.readouterr().err


def test_missing_block_and_usage_errors(tmp_path):
    assert run(tmp_path, "solve", "--config", str(CONFIGS / "octagon.json"))[0] == 2
    assert main(["nonsense"]) == 2
    assert main(["verify", "--suite", "nope"]) == 2
    assert main(["bessel", "--tol", "-1"]) == 2


def test_verify_bounds_on_config(tmp_path, capsys):
    code = main(["verify", "--suite", "bounds", "--config", str(CONFIGS / "disk-z4.json"),
                 "--out", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "g >= 4|q|^1/2" in out and "3psi2-psi1 <= log(4/3)" in out
    report = json.loads((tmp_path / "verify.json").read_text())
    assert report["ok"] and report["n_failed"] == 0


def test_nonconvergence_exits_1(tmp_path):
    cfg = json.loads((CONFIGS / "disk-z4.json").read_text())
    cfg["solver"] = {"tolerance": 1e-14, "max_iterations": 1}
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    assert run(tmp_path, "solve", "--config", str(p))[0] == 1


def test_sweep(tmp_path):
    code, out = run(tmp_path, "sweep", "--config", str(CONFIGS / "disk-z4.json"))
    assert code == 0
    lines = (out / "ray.csv").read_text().splitlines()
    assert lines[0] == "t,min_increment,ratio_deviation,area_ratio" and len(lines) == 5


def test_flat_and_entropy(tmp_path):
    code, out = run(tmp_path, "flat", "--config", str(CONFIGS / "square-torus.json"))
    assert code == 0
    rows = (out / "geodesics.csv").read_text().splitlines()
    assert rows[1].startswith('"torus(3, 4)",5,')
    code, out = run(tmp_path, "entropy", "--config", str(CONFIGS / "square-torus.json"))
    assert code == 0
    assert (out / "counts.csv").read_text().splitlines()[0] == "L,N"
    assert (out / "windows.csv").read_text().splitlines()[0] == "L,slope"


def test_bad_curve_names_the_curve(tmp_path, capsys):
    cfg = json.loads((CONFIGS / "octagon.json").read_text())
    cfg["curves"] = [{"word": [0, 99]}]
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    assert run(tmp_path, "flat", "--config", str(p))[0] == 1
    assert "word(0, 99)" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ("solve", "--config", str(CONFIGS / "disk-q0.json")),
    ("flat", "--config", str(CONFIGS / "octagon.json")),
    ("bessel",),
])
def test_outputs_are_byte_identical(tmp_path, argv):
    _, a = run(tmp_path, *argv, sub="a")
    _, b = run(tmp_path, *argv, sub="b")
    files = sorted(p.name for p in a.iterdir())
    assert files == sorted(p.name for p in b.iterdir())
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
