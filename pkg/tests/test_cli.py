import csv
import json
import subprocess
import sys

import pytest

from ibnls.cli import main

SMALL = {"N": 6, "b": 1.0, "r_max": 15.0, "n": 128}


def run(tmp_path, command, cfg=None, *extra):
    argv = ["--out", str(tmp_path)]
    if cfg is not None:
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        argv += ["--config", str(path)]
    return main(argv + list(extra) + [command])


def header(path):
    with open(path) as fh:
        return next(csv.reader(fh))


def test_ground_state(tmp_path):
    assert run(tmp_path, "ground-state", SMALL) == 0
    assert header(tmp_path / "W.csv") == ["r", "re_u", "im_u"]
    out = json.loads((tmp_path / "ground_state.json").read_text())
    for key in ("kinetic_W", "energy_W", "k_opt", "residual"):
        assert key in out
    assert out["residual"] < 1e-8


def test_evolve(tmp_path):
    cfg = dict(SMALL, T=2e-3, R=5.0, dt0=1e-4, output_interval=1e-3,
               outputs={"csv": "a.csv", "summary": "a.json"})
    assert run(tmp_path, "evolve", cfg) == 0
    assert header(tmp_path / "a.csv") == ["t", "mass", "energy", "kinetic", "grad_sq",
                                          "potential", "V_R", "rate_localized", "dt"]
    s = json.loads((tmp_path / "a.json").read_text())
    assert s["termination"] == "horizon_reached"
    assert set(s["drifts"]) == {"mass", "energy"} and "t_star_estimate" in s


def test_verify(tmp_path, capsys):
    cfg = dict(SMALL, r_max=30.0, n=512, R=7.5, samples=10)
    assert run(tmp_path, "verify", cfg) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5 and all(line.startswith("PASS") for line in lines)
    assert json.loads((tmp_path / "verify.json").read_text())["passed"] is True
    assert header(tmp_path / "cutoff.csv")[0] == "r"


def test_verify_failure_exit_code(tmp_path, monkeypatch, capsys):
    import ibnls.verify as verify
    real = verify.run_checks

    def failing(*args, **kwargs):
        report, cut = real(*args, **kwargs)
        report["checks"]["pohozaev"]["passed"] = False
        report["passed"] = False
        return report, cut

    monkeypatch.setattr(verify, "run_checks", failing)
    assert run(tmp_path, "verify", dict(SMALL, r_max=30.0, n=512, R=7.5, samples=3)) == 2
    assert "FAIL  pohozaev" in capsys.readouterr().out


def test_verify_grid_too_coarse(tmp_path):
    assert run(tmp_path, "verify", {"r_max": 30.0, "n": 32, "R": 7.0, "samples": 5}) == 1


def test_numerical_failure_exit_code(tmp_path):
    cfg = dict(SMALL, ground_state={"max_iter": 1, "restarts": 0})
    assert run(tmp_path, "ground-state", cfg) == 2


def test_classify(tmp_path):
    cfg = dict(SMALL, data={"family": "gaussian", "amplitude": 12.0}, radial=False)
    assert run(tmp_path, "classify", cfg) == 0
    out = json.loads((tmp_path / "classification.json").read_text())
    assert out["regime"] == "thm12_case1_dichotomy"
    cfg = {"N": 5, "b": 1.0, "r_max": 15.0, "n": 128,
           "data": {"family": "gaussian", "amplitude": 12.0}, "require": "thm12_case2_blowup"}
    assert run(tmp_path, "classify", cfg) == 0
    out = json.loads((tmp_path / "classification.json").read_text())
    assert out["regime"] == "outside_hypotheses" and "b_range_empty" in out["reasons"]


def test_ode_demo(tmp_path):
    assert run(tmp_path, "ode-demo") == 0
    out = json.loads((tmp_path / "ode.json").read_text())
    assert out["t_star"] == pytest.approx(1 / 3)
    assert header(tmp_path / "ode.csv") == ["t", "A"]
    assert run(tmp_path, "ode-demo", {"C": 0.0}) == 1


def test_sweep(tmp_path):
    cfg = {"base": dict(SMALL, T=2e-3, R=5.0, dt0=1e-4, output_interval=1e-3),
           "grid": {"b": [0.5, 1.0], "data.amplitude": [0.5, 1.0]}, "parallelism": 2}
    assert run(tmp_path, "sweep", cfg) == 0
    rows = json.loads((tmp_path / "sweep.json").read_text())
    assert len(rows) == 4
    assert [r["config"]["data"]["amplitude"] for r in rows] == [0.5, 1.0, 0.5, 1.0]
    with open(tmp_path / "sweep.csv") as fh:
        assert len(list(csv.reader(fh))) == 5


@pytest.mark.parametrize("cfg", [{"N": 4}, {"N": 5, "b": 3.0}, {"n": 4}])
def test_validation_exit_code(tmp_path, cfg):
    assert run(tmp_path, "ground-state", cfg) == 1


def test_bad_config_and_usage(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["--config", str(bad), "ode-demo"]) == 1
    assert main(["--config", str(tmp_path / "missing.json"), "ode-demo"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1


def test_evolve_unknown_key(tmp_path):
    assert run(tmp_path, "evolve", dict(SMALL, horizon=1.0)) == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ibnls", "--out", str(tmp_path), "ode-demo"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert (tmp_path / "ode.json").exists()
