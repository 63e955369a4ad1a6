"""Time stepping of i u_t + Δ²u = |x|^{-b}|u|^alpha u on a radial grid.

Strang splitting: a half step of the exact nonlinear phase rotation, the
exact linear step u -> exp(i dt Δ²) u in the eigenbasis of the discrete
Laplacian, then another half phase step. Both substeps preserve the discrete
mass exactly, and the scheme is symmetric, so stepping dt then -dt returns the
starting field up to rounding.
"""
from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .cutoff import make_cutoff, smoothstep
from .errors import ConfigError, NonFinite, ValidationError
from .functionals import kinetic, report
from .grid import RadialField, RadialGrid, make_grid, read_field_csv
from .model import make_params
from .virial import virial_report

COLUMNS = ("t", "mass", "energy", "kinetic", "grad_sq", "potential", "V_R",
           "rate_localized", "dt")
TERMINATIONS = ("horizon_reached", "blowup_detected", "dt_floor")


@dataclass
class SimState:
    t: float
    u: RadialField
    dt: float
    step_count: int = 0


def _phase(grid: RadialGrid, u: np.ndarray, tau: float) -> np.ndarray:
    # exact solution of i u_t = -|x|^{-b}|u|^alpha u over time tau (|u| is constant)
    return u * np.exp(-1j * tau * grid.r_minus_b * np.abs(u) ** grid.params.alpha)


def linear_step(grid: RadialGrid, u: np.ndarray, dt: float) -> np.ndarray:
    """u -> exp(i dt Δ²) u, the flow of u_t = iΔ²u."""
    lam, Q, s = grid.lap_eigen
    z = u / s
    w = Q.T @ np.column_stack((z.real, z.imag))
    w = (w[:, 0] + 1j * w[:, 1]) * np.exp(1j * dt * lam ** 2)
    y = Q @ np.column_stack((w.real, w.imag))
    return s * (y[:, 0] + 1j * y[:, 1])


def step(s: SimState, dt: float, nonlinear: bool = True) -> SimState:
    """One Strang step. Negative dt runs the (reversible) scheme backwards."""
    if not np.isfinite(dt) or dt == 0.0:
        raise ValidationError(f"step size must be finite and nonzero, got {dt}")
    grid = s.u.grid
    u = s.u.values
    if nonlinear:
        u = _phase(grid, u, 0.5 * dt)
    u = linear_step(grid, u, dt)
    if nonlinear:
        u = _phase(grid, u, 0.5 * dt)
    if not np.all(np.isfinite(u)):
        raise NonFinite(f"non-finite values at t = {s.t + dt}")
    return SimState(s.t + dt, RadialField(grid, u), dt, s.step_count + 1)


# --------------------------------------------------------------------------
# initial data

def taper_window(r: np.ndarray, start: float, stop: float) -> np.ndarray:
    """1 for r <= start, 0 for r >= stop, C⁶ smoothstep in between."""
    H = smoothstep()
    x = np.clip((r - start) / (stop - start), 0.0, 1.0)
    return 1.0 - H(x)


def initial_field(grid: RadialGrid, data: dict, ground_state=None) -> RadialField:
    """Build u0 from a data spec.

    family "gaussian":     amplitude·exp(-(r/width)²)
    family "ground_state": amplitude·W (needs ``ground_state``)
    family "file":         CSV with columns r, re_u, im_u on this grid
    Optional keys: chirp κ (factor e^{iκr²}), taper [start, stop] radii.
    """
    fam = data.get("family", "gaussian")
    r = grid.nodes
    if fam == "gaussian":
        w = float(data.get("width", 1.0))
        if not w > 0:
            raise ConfigError("gaussian width must be positive")
        u = float(data.get("amplitude", 1.0)) * np.exp(-(r / w) ** 2)
    elif fam == "ground_state":
        if ground_state is None:
            raise ConfigError("ground_state family needs a computed ground state")
        u = float(data.get("amplitude", 1.0)) * ground_state.on_grid(grid).values.real
    elif fam == "file":
        u = read_field_csv(grid, data["path"]).values
    else:
        raise ConfigError(f"unknown initial-data family {fam!r}")
    u = np.asarray(u, dtype=complex)
    kappa = float(data.get("chirp", 0.0))
    if kappa:
        u = u * np.exp(1j * kappa * r ** 2)
    if data.get("taper"):
        a, b = map(float, data["taper"])
        if not 0 < a < b <= grid.r_max:
            raise ConfigError(f"taper needs 0 < start < stop <= r_max, got {a}, {b}")
        u = u * taper_window(r, a, b)
    return RadialField(grid, u)


# --------------------------------------------------------------------------
# configuration and driver

@dataclass
class SimConfig:
    N: int = 6
    b: float = 1.0
    r_max: float = 30.0
    n: int = 512
    data: dict = field(default_factory=lambda: {"family": "gaussian", "amplitude": 1.0,
                                                "width": 1.0})
    T: float = 0.1
    R: float = 10.0
    dt0: float = 1e-4
    dt_min: float = 1e-10
    growth_factor: float = 50.0
    kinetic_threshold: float = 1e4    # stop once kinetic > threshold * initial
    output_interval: float = 1e-3
    phase_cap: Optional[float] = 0.1  # max nonlinear phase per step; None disables
    ground_state: dict = field(default_factory=dict)   # options for the W solve

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        make_params(self.N, self.b)
        for name in ("r_max", "T", "R", "dt0", "dt_min", "output_interval"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and np.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be a positive number, got {v!r}")
        if self.dt_min >= self.dt0:
            raise ConfigError("dt_min must be below dt0")
        if 2.0 * self.R >= self.r_max:
            raise ConfigError(f"need 2R < r_max, got R = {self.R}, r_max = {self.r_max}")
        if self.growth_factor <= 1 or self.kinetic_threshold <= 1:
            raise ConfigError("growth_factor and kinetic_threshold must exceed 1")
        if self.phase_cap is not None and not self.phase_cap > 0:
            raise ConfigError("phase_cap must be positive or null")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class TimeSeries:
    records: list = field(default_factory=list)       # dicts keyed by COLUMNS
    termination: str = "horizon_reached"
    nonfinite: bool = False
    steps: int = 0
    last_adaptive_dt: float = float("nan")
    dt0: float = float("nan")
    dt_min: float = float("nan")
    wall_time: float = 0.0
    final_state: Optional[SimState] = field(default=None, repr=False)

    def column(self, name: str) -> np.ndarray:
        return np.array([rec[name] for rec in self.records])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(COLUMNS)
            for rec in self.records:
                w.writerow([repr(float(rec[c])) for c in COLUMNS])

    def drifts(self) -> dict:
        m, e, k = self.column("mass"), self.column("energy"), self.column("kinetic")
        e_scale = abs(e[0]) if e[0] != 0.0 else 0.5 * k[0]
        return {"mass": float(np.max(np.abs(m - m[0])) / m[0]),
                "energy": float(np.max(np.abs(e - e[0])) / e_scale)}

    def summary(self, growth_factor: float = 50.0) -> dict:
        det = detect_blowup(self, growth_factor)
        return {"termination": self.termination, "t_star_estimate": det["t_star_estimate"],
                "verdict": det["verdict"], "kinetic_growth": det["growth"],
                "drifts": self.drifts(), "steps": self.steps, "nonfinite": self.nonfinite,
                "last_adaptive_dt": self.last_adaptive_dt, "t_final": self.records[-1]["t"],
                "wall_time": self.wall_time}

    def write_summary(self, path, growth_factor: float = 50.0, extra: dict | None = None):
        out = self.summary(growth_factor)
        out.update(extra or {})
        with open(path, "w") as fh:
            json.dump(out, fh, indent=2, default=float)


def _record(t, u, cutoff, dt) -> dict:
    rep = report(u)
    vr = virial_report(u, cutoff)
    return {"t": t, "mass": rep.mass, "energy": rep.energy, "kinetic": rep.kinetic,
            "grad_sq": rep.grad_sq, "potential": rep.potential, "V_R": vr.V,
            "rate_localized": vr.rate_localized, "dt": dt}


def evolve(config: SimConfig, u0: RadialField | None = None, ground_state=None) -> TimeSeries:
    """Integrate from the configured data to the horizon T, or until blow-up.

    dt = dt0·min(1, K0/K(u)) with K = ‖Δu‖², further capped so the nonlinear
    phase per step stays below ``phase_cap``. Diagnostics are recorded every
    ``output_interval``. Stops with
      dt_floor         when the adaptive dt falls below dt_min,
      blowup_detected  when K exceeds kinetic_threshold·K0 or values overflow,
      horizon_reached  at t = T.
    """
    config.validate()
    params = make_params(config.N, config.b)
    grid = u0.grid if u0 is not None else make_grid(params, config.r_max, config.n)
    if u0 is None:
        if config.data.get("family") == "ground_state" and ground_state is None:
            from .ground_state import solve_ground_state
            ground_state = solve_ground_state(grid, config.ground_state)
        u0 = initial_field(grid, config.data, ground_state)
    cutoff = make_cutoff(grid, config.R)
    rb = grid.r_minus_b
    alpha = params.alpha
    start = time.perf_counter()

    k0 = kinetic(grid, u0)
    if not k0 > 0:
        raise ValidationError("initial data has zero kinetic term")
    series = TimeSeries(dt0=config.dt0, dt_min=config.dt_min)
    state = SimState(0.0, u0, config.dt0)
    series.records.append(_record(0.0, u0, cutoff, config.dt0))
    n_out = 1
    next_out = min(config.output_interval, config.T)
    last_recorded = 0.0
    while True:
        u = state.u.values
        k = kinetic(grid, u)
        dt = config.dt0 * min(1.0, k0 / k)
        if config.phase_cap is not None:
            peak = float(np.max(rb * np.abs(u) ** alpha))
            if peak > 0:
                dt = min(dt, config.phase_cap / peak)
        series.last_adaptive_dt = dt
        if k > config.kinetic_threshold * k0:
            series.termination = "blowup_detected"
            break
        if dt < config.dt_min:
            series.termination = "dt_floor"
            break
        dt_step = min(dt, next_out - state.t)
        try:
            state = step(state, dt_step)
        except NonFinite:
            series.nonfinite = True
            series.termination = "blowup_detected"
            break
        state.dt = dt
        if state.t >= next_out * (1.0 - 1e-12):
            state.t = next_out
            series.records.append(_record(state.t, state.u, cutoff, dt))
            last_recorded = state.t
            if next_out >= config.T:
                series.termination = "horizon_reached"
                break
            n_out += 1
            next_out = min(n_out * config.output_interval, config.T)
    if state.t > last_recorded:
        series.records.append(_record(state.t, state.u, cutoff, state.dt))
    series.steps = state.step_count
    series.final_state = state
    series.wall_time = time.perf_counter() - start
    return series


# --------------------------------------------------------------------------
# blow-up detection

def fit_blowup_time(t: np.ndarray, k: np.ndarray) -> tuple:
    """Fit k ~ c (T* - t)^{-γ}; returns (T*, γ). Needs increasing k at the end."""
    t = np.asarray(t, dtype=float)
    logk = np.log(np.asarray(k, dtype=float))
    span = t[-1] - t[0]
    if span <= 0 or t.size < 3:
        return float("nan"), float("nan")

    def misfit(log_gap):
        x = np.log(t[-1] + np.exp(log_gap) - t)
        A = np.column_stack((np.ones_like(x), x))
        coef, *_ = np.linalg.lstsq(A, logk, rcond=None)
        return float(np.sum((A @ coef - logk) ** 2)), coef

    lo, hi = np.log(span * 1e-6), np.log(span * 1e2)
    grid = np.linspace(lo, hi, 200)
    vals = [misfit(g)[0] for g in grid]
    i = int(np.argmin(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    best = minimize_scalar(lambda g: misfit(g)[0], bounds=(a, b), method="bounded",
                           options={"xatol": 1e-10})
    gap = float(np.exp(best.x))
    coef = misfit(best.x)[1]
    return float(t[-1] + gap), float(-coef[1])


def detect_blowup(series: TimeSeries, growth_factor: float = 50.0) -> dict:
    """Operational blow-up verdict.

    blowup when kinetic grew by >= growth_factor and the run ended on the dt
    floor, overflowed, or its adaptive step shrank by at least growth_factor.
    T* is fitted on the last decade of kinetic growth.
    """
    if not series.records:
        raise ValidationError("empty time series")
    k = series.column("kinetic")
    t = series.column("t")
    growth = float(np.max(k) / k[0])
    dt_collapsed = (series.termination == "dt_floor" or series.nonfinite
                    or (np.isfinite(series.last_adaptive_dt)
                        and series.last_adaptive_dt <= series.dt0 / growth_factor))
    verdict = "blowup" if growth >= growth_factor and dt_collapsed else "no_blowup_within_horizon"
    t_star = None
    if verdict == "blowup":
        sel = k >= k[-1] / 10.0
        first = int(np.argmax(sel))
        if k.size - first >= 3:
            ts, _ = fit_blowup_time(t[first:], k[first:])
            t_star = ts if np.isfinite(ts) else None
    return {"verdict": verdict, "t_star_estimate": t_star, "growth": growth}
