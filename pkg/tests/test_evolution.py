import csv
import json

import numpy as np
import pytest

from ibnls.errors import ConfigError, DimensionTooSmall, ValidationError
from ibnls.evolution import (COLUMNS, SimConfig, SimState, TimeSeries, detect_blowup, evolve,
                             fit_blowup_time, initial_field, linear_step, step, taper_window)
from ibnls.functionals import report
from ibnls.grid import make_grid
from ibnls.model import make_params


@pytest.fixture(scope="module")
def small_grid():
    return make_grid(make_params(6, 1.0), 15.0, 128)


def test_linear_step_is_unitary(grid61, rng):
    u = grid61.sample(lambda r: np.exp(-r * r) * (1 + 1j * r))
    m0 = grid61.norm_sq(u.values)
    v = u.values
    for dt in (1e-4, 1e-2, 1.0):
        v = linear_step(grid61, v, dt)
        assert abs(grid61.norm_sq(v) / m0 - 1) < 1e-12
    s = step(SimState(0.0, u, 1e-3), 1e-3, nonlinear=False)
    assert abs(grid61.norm_sq(s.u.values) / m0 - 1) < 1e-12


def test_nonlinear_substep_keeps_modulus(grid61):
    from ibnls.evolution import _phase
    u = grid61.sample(lambda r: 3 * np.exp(-r * r) * np.exp(0.2j * r))
    v = _phase(grid61, u.values, 0.37)
    assert np.max(np.abs(np.abs(v) - np.abs(u.values))) <= 1e-15 * np.abs(u.values).max()


def test_energy_error_second_order(small_grid):
    # steps small enough that dt·λ² stays O(1) on the stiffest mode
    u0 = small_grid.sample(lambda r: np.exp(-(r / 1.5) ** 2))
    e0 = report(u0).energy
    errs = []
    for dt in (4e-5, 2e-5, 1e-5):
        s = SimState(0.0, u0, dt)
        worst = 0.0
        for i in range(int(round(0.1 / dt))):
            s = step(s, dt)
            if i % 50 == 0:
                worst = max(worst, abs(report(s.u).energy - e0))
        errs.append(worst / abs(e0))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1.9), orders


def test_time_reversal(grid61):
    u0 = grid61.sample(lambda r: 2 * np.exp(-r * r) * np.exp(0.3j * r * r))
    s = SimState(0.0, u0, 1e-4)
    for _ in range(5):
        s = step(s, 1e-4)
    for _ in range(5):
        s = step(s, -1e-4)
    err = np.sqrt(grid61.norm_sq(s.u.values - u0.values) / grid61.norm_sq(u0.values))
    assert err < 1e-8
    assert s.t == pytest.approx(0.0, abs=1e-15)


def test_step_rejects_zero(grid61):
    with pytest.raises(ValidationError):
        step(SimState(0.0, grid61.field(np.ones(grid61.n)), 1e-3), 0.0)


def test_ground_state_nearly_stationary(gs61, grid61):
    u0 = initial_field(grid61, {"family": "ground_state", "taper": [8.0, 28.0]}, gs61)
    k0 = report(u0).kinetic
    rate = np.max(grid61.r_minus_b * np.abs(u0.values) ** grid61.params.alpha)
    dt = 0.02 / rate
    s = SimState(0.0, u0, dt)
    worst = 0.0
    for i in range(int(round(1e-4 / dt))):
        s = step(s, dt)
        worst = max(worst, abs(report(s.u).kinetic / k0 - 1))
    assert worst < 1e-4


def test_small_gaussian_conserves(small_grid):
    cfg = SimConfig(r_max=15.0, n=128, T=0.02, R=5.0, dt0=1e-4, output_interval=2e-3,
                    data={"family": "gaussian", "amplitude": 0.5, "width": 1.5})
    ser = evolve(cfg)
    assert ser.termination == "horizon_reached"
    d = ser.drifts()
    assert d["mass"] < 1e-10 and d["energy"] < 1e-6
    t = ser.column("t")
    assert np.all(np.diff(t) > 0) and t[-1] == pytest.approx(0.02)
    assert len(ser.records) == 11
    assert detect_blowup(ser)["verdict"] == "no_blowup_within_horizon"


def test_dt_floor_termination():
    cfg = SimConfig(r_max=10.0, n=128, T=1.0, R=3.0, dt0=1e-4, dt_min=5e-5, phase_cap=0.1,
                    data={"family": "gaussian", "amplitude": 12.0, "width": 1.0})
    ser = evolve(cfg)
    assert ser.termination == "dt_floor"
    assert ser.last_adaptive_dt < 5e-5


def test_kinetic_threshold_termination():
    cfg = SimConfig(r_max=10.0, n=256, T=1e-3, R=4.0, dt0=1e-6, dt_min=1e-12,
                    kinetic_threshold=1.05, output_interval=1e-5,
                    data={"family": "gaussian", "amplitude": 12.0, "width": 1.0})
    ser = evolve(cfg)
    assert ser.termination == "blowup_detected"
    assert ser.column("kinetic")[-1] > 1.0 * ser.column("kinetic")[0]


def _synthetic(t_star, gamma, n=60, termination="dt_floor", flat=False):
    t = t_star * (1 - np.logspace(0, -4, n))
    t = t - t[0]
    k = np.full_like(t, 3.0) if flat else (t_star - t) ** -gamma
    recs = [{c: 0.0 for c in COLUMNS} | {"t": a, "kinetic": b} for a, b in zip(t, k)]
    return TimeSeries(records=recs, termination=termination, dt0=1e-3, dt_min=1e-10,
                      last_adaptive_dt=1e-11)


@pytest.mark.parametrize("t_star,gamma", [(0.5, 1.0), (2.0, 0.5), (0.01, 2.0)])
def test_detect_blowup_recovers_time(t_star, gamma):
    ser = _synthetic(t_star, gamma)
    det = detect_blowup(ser, 50.0)
    assert det["verdict"] == "blowup"
    assert det["t_star_estimate"] == pytest.approx(t_star, rel=1e-2)
    ts, g = fit_blowup_time(ser.column("t"), ser.column("kinetic"))
    assert g == pytest.approx(gamma, rel=1e-2)


def test_detect_blowup_flat_and_needs_collapse():
    assert detect_blowup(_synthetic(0.5, 1.0, flat=True))["verdict"] == "no_blowup_within_horizon"
    ser = _synthetic(0.5, 1.0, termination="horizon_reached")
    ser.last_adaptive_dt = 1e-3           # growth without step collapse
    assert detect_blowup(ser)["verdict"] == "no_blowup_within_horizon"
    with pytest.raises(ValidationError):
        detect_blowup(TimeSeries())


@pytest.mark.parametrize("bad", [
    {"N": 4}, {"b": 3.0, "N": 5}, {"R": 15.0}, {"dt_min": 1e-3}, {"T": -1.0},
    {"growth_factor": 1.0}, {"phase_cap": 0.0}, {"output_interval": 0}, {"r_max": "x"},
])
def test_config_validation(bad):
    with pytest.raises(ValidationError):
        SimConfig.from_dict(bad)


def test_config_unknown_key_and_round_trip():
    with pytest.raises(ConfigError):
        SimConfig.from_dict({"horizon": 1.0})
    with pytest.raises(DimensionTooSmall):
        SimConfig.from_dict({"N": 3})
    cfg = SimConfig.from_dict({"N": 7, "b": 0.5, "phase_cap": None})
    assert SimConfig.from_dict(cfg.as_dict()) == cfg


def test_csv_and_summary(tmp_path):
    cfg = SimConfig(r_max=15.0, n=128, T=2e-3, R=5.0, dt0=1e-4, output_interval=1e-3)
    ser = evolve(cfg)
    ser.to_csv(tmp_path / "run.csv")
    with open(tmp_path / "run.csv") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == COLUMNS
    assert len(rows) == len(ser.records) + 1
    ser.write_summary(tmp_path / "s.json", extra={"tag": 1})
    s = json.loads((tmp_path / "s.json").read_text())
    for key in ("termination", "t_star_estimate", "drifts", "tag"):
        assert key in s


def test_initial_field_families(tmp_path, grid61, gs61):
    g = initial_field(grid61, {"family": "gaussian", "amplitude": 2.0, "width": 0.5})
    assert g.values[0] == pytest.approx(2 * np.exp(-(grid61.h / 0.5) ** 2))
    w = initial_field(grid61, {"family": "ground_state", "amplitude": 1.05}, gs61)
    assert np.allclose(w.values, 1.05 * gs61.W.values)
    c = initial_field(grid61, {"family": "gaussian", "chirp": 0.4})
    assert np.allclose(np.abs(c.values), np.exp(-grid61.nodes ** 2))
    t = initial_field(grid61, {"family": "ground_state", "taper": [5.0, 10.0]}, gs61)
    assert np.all(t.values[grid61.nodes >= 10.0] == 0)
    assert np.array_equal(t.values[grid61.nodes <= 5.0], gs61.W.values[grid61.nodes <= 5.0])
    path = tmp_path / "u0.csv"
    c.to_csv(path)
    assert np.array_equal(initial_field(grid61, {"family": "file", "path": str(path)}).values,
                          c.values)
    for bad in ({"family": "soliton"}, {"family": "gaussian", "width": 0.0},
                {"family": "gaussian", "taper": [5.0, 2.0]}):
        with pytest.raises(ConfigError):
            initial_field(grid61, bad)
    with pytest.raises(ConfigError):
        initial_field(grid61, {"family": "ground_state"})


def test_taper_window():
    r = np.linspace(0, 10, 101)
    w = taper_window(r, 3.0, 7.0)
    assert np.all(w[r <= 3] == 1) and np.all(w[r >= 7] == 0)
    assert np.all(np.diff(w) <= 0)
