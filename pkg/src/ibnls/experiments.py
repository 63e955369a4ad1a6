"""Theorem-level decision logic, the ODE comparison argument, and sweeps."""
from __future__ import annotations

import hashlib
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DegenerateConstants, IBNLSError
from .functionals import report
from .model import make_params

REGIMES = ("thm11_radial_blowup", "thm12_case1_dichotomy", "thm12_case2_blowup",
           "outside_hypotheses")


@dataclass(frozen=True)
class Facts:
    """Everything the blow-up theorems look at."""
    N: int
    b: float
    energy: float
    energy_W: float
    kinetic: float
    kinetic_W: float
    radial: bool

    @property
    def threshold(self) -> float:
        return 16.0 / self.N

    @property
    def b_at_least_threshold(self) -> bool:
        return Fraction(self.b).limit_denominator(10 ** 12) >= Fraction(16, self.N)

    @property
    def b_range_empty(self) -> bool:
        """No admissible b reaches 16/N (true exactly for N = 5)."""
        return Fraction(16, self.N) >= min(Fraction(4), Fraction(self.N, 2))

    @property
    def negative_energy(self) -> bool:
        return self.energy < 0.0

    @property
    def above_ground_state(self) -> bool:
        """0 <= E < E(W) and ‖Δu0‖ > ‖ΔW‖."""
        return 0.0 <= self.energy < self.energy_W and self.kinetic > self.kinetic_W

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(threshold=self.threshold, b_at_least_threshold=self.b_at_least_threshold,
                 b_range_empty=self.b_range_empty, negative_energy=self.negative_energy,
                 above_ground_state=self.above_ground_state)
        return d


@dataclass(frozen=True)
class Classification:
    regime: str
    facts: Facts
    reasons: tuple = field(default=())

    def as_dict(self) -> dict:
        return {"regime": self.regime, "facts": self.facts.as_dict(),
                "reasons": list(self.reasons)}


def failed_hypotheses(facts: Facts, regime: str) -> list:
    """Hypotheses of ``regime`` that the facts violate (empty when it applies)."""
    energy_ok = facts.negative_energy or facts.above_ground_state
    out = []
    if regime == "thm11_radial_blowup":
        if not facts.radial:
            out.append("not_radial")
        if not energy_ok:
            out.append("energy_hypotheses")
    elif regime == "thm12_case1_dichotomy":
        if facts.b_at_least_threshold:
            out.append("b_at_least_16_over_N")
        if not facts.negative_energy:
            out.append("energy_not_negative")
    elif regime == "thm12_case2_blowup":
        if facts.b_range_empty:
            out.append("b_range_empty")
        elif not facts.b_at_least_threshold:
            out.append("b_below_16_over_N")
        if not energy_ok:
            out.append("energy_hypotheses")
    else:
        raise ValueError(f"unknown regime {regime!r}")
    return out


def classify_facts(facts: Facts, require: str | None = None) -> Classification:
    """Regime from the hypotheses of the two blow-up theorems.

    Radial data satisfy the hypotheses of both theorems; the radial one is
    preferred since its conclusion is finite-time blow-up for every b. With
    ``require`` only that regime is tested, and its failed hypotheses come
    back as reasons.
    """
    if require is not None:
        failed = failed_hypotheses(facts, require)
        if failed:
            return Classification("outside_hypotheses", facts, tuple(failed))
        return Classification(require, facts)
    order = (["thm11_radial_blowup"] if facts.radial else []) + [
        "thm12_case2_blowup", "thm12_case1_dichotomy"]
    reasons = []
    for regime in order:
        failed = failed_hypotheses(facts, regime)
        if not failed:
            return Classification(regime, facts)
        reasons += [r for r in failed if r not in reasons]
    return Classification("outside_hypotheses", facts, tuple(reasons))


def classify(f, gs, radial: bool = True, require: str | None = None) -> Classification:
    """Classify initial data f against the theorems, using the certified W."""
    rep = report(f)
    params = f.grid.params
    facts = Facts(params.N, params.b, rep.energy, gs.energy_W, rep.kinetic,
                  gs.kinetic_W, bool(radial))
    return classify_facts(facts, require)


# --------------------------------------------------------------------------
# ODE comparison

def ode_blowup(A1: float, C: float, t1: float = 0.0, threshold: float = 1e6,
               rtol: float = 1e-12, samples: int = 2001) -> dict:
    """A' = C⁴A⁴ from A(t1) = A1: closed-form blow-up time and a numeric trajectory.

    t* = t1 + 1/(3 C⁴ A1³). Near t* the solution outruns double precision in t
    (A = 10⁶ is reached 3·10⁻¹⁹ before t* = 1/3), so the ODE is integrated
    with s = ln A as the independent variable, dt/ds = e^{-3s}/C⁴, up to
    A = ``threshold``.

    The comparison bound A(t)³ >= A1³/(1 - 3C⁴A1³(t - t1)) is checked in its
    equivalent form t <= t1 + (A1^{-3} - A(t)^{-3})/(3C⁴), the time the
    comparison solution needs to reach A(t). ``lower_bound_margin`` is the
    smallest slack, in units of t* - t1; for the extremal equation it is zero
    up to integration error.
    """
    if not (np.isfinite(A1) and A1 > 0):
        raise DegenerateConstants(f"need A1 > 0, got {A1}")
    if not (np.isfinite(C) and C > 0):
        raise DegenerateConstants(f"need C > 0, got {C}")
    c4 = C ** 4
    t_star = t1 + 1.0 / (3.0 * c4 * A1 ** 3)
    s0, s1 = np.log(A1), np.log(max(threshold, A1))
    s = np.linspace(s0, s1, samples)
    if s1 > s0:
        sol = solve_ivp(lambda _, y: np.exp(-3.0 * _) / c4 * np.ones_like(y), (s0, s1), [t1],
                        method="DOP853", t_eval=s, rtol=rtol, atol=rtol * (t_star - t1))
        t = sol.y[0]
    else:
        t = np.full_like(s, t1)
    A = np.exp(s)
    t_reach = t1 + (A1 ** -3 - A ** -3) / (3.0 * c4)
    margin = float(np.min(t_reach - t) / (t_star - t1))
    return {"t_star": t_star, "t_cross": float(t[-1]), "threshold": threshold,
            "trajectory": {"t": t, "A": A}, "lower_bound_margin": margin}


# --------------------------------------------------------------------------
# sweeps

def _run_one(cfg, gs_cache: dict) -> dict:
    from .evolution import SimConfig, evolve, initial_field, detect_blowup
    from .grid import make_grid
    from .ground_state import solve_ground_state
    row = {"config": cfg.as_dict() if isinstance(cfg, SimConfig) else cfg}
    try:
        if not isinstance(cfg, SimConfig):
            cfg = SimConfig.from_dict(cfg)
        cfg.validate()
        params = make_params(cfg.N, cfg.b)
        grid = make_grid(params, cfg.r_max, cfg.n)
        key = (cfg.N, cfg.b, cfg.r_max, cfg.n)
        if key not in gs_cache:
            gs_cache[key] = solve_ground_state(grid, cfg.ground_state)
        gs = gs_cache[key]
        u0 = initial_field(grid, cfg.data, gs)
        row["regime"] = classify(u0, gs, radial=True).regime
        series = evolve(cfg, u0=u0, ground_state=gs)
        det = detect_blowup(series, cfg.growth_factor)
        buf = io.StringIO()
        _write_csv(series, buf)
        row.update(termination=series.termination, t_star_estimate=det["t_star_estimate"],
                   verdict=det["verdict"], kinetic_growth=det["growth"],
                   consistency=_consistency(row["regime"], series.termination),
                   csv_sha256=hashlib.sha256(buf.getvalue().encode()).hexdigest(),
                   error=None)
    except (IBNLSError, ValueError, ArithmeticError) as exc:
        row.update(termination=None, t_star_estimate=None, error=f"{type(exc).__name__}: {exc}")
    return row


def _write_csv(series, fh) -> None:
    import csv
    from .evolution import COLUMNS
    w = csv.writer(fh)
    w.writerow(COLUMNS)
    for rec in series.records:
        w.writerow([repr(float(rec[c])) for c in COLUMNS])


def _consistency(regime: str, termination: str) -> str:
    predicts = regime in ("thm11_radial_blowup", "thm12_case2_blowup")
    if not predicts:
        return "no_prediction"
    if termination == "horizon_reached":
        return "horizon_too_short"
    return "consistent"


def sweep(configs, parallelism: int = 1) -> list:
    """Run evolve per config; one summary row each, in submission order.

    Failures are captured in the row's ``error`` field and never stop the sweep.
    """
    from .evolution import SimConfig
    configs = list(configs)
    if not configs:
        return []
    caches = [{} for _ in configs]    # per-row caches keep rows independent
    if parallelism <= 1:
        return [_run_one(c, cache) for c, cache in zip(configs, caches)]
    with ThreadPoolExecutor(max_workers=int(parallelism)) as pool:
        futures = [pool.submit(_run_one, c, cache) for c, cache in zip(configs, caches)]
        return [fut.result() for fut in futures]
