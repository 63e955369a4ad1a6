"""Ground state of Δ²W = |x|^{-b} |W|^alpha W and the constants it certifies.

The radial equation is solved in Emden-Fowler variables. With t = ln r and
W(r) = r^{-a} v(t), a = (N-4)/2, the operator becomes constant-coefficient,

    Δ²W = r^{-a-4} (D² - a²)(D² - N²/4) v,     D = d/dt,

and the weight r^{-b} W^q = r^{-a-4} v^q, so the profile solves

    (D² - a²)(D² - N²/4) v = |v|^alpha v     on the whole line.

The symbol (k² + a²)(k² + N²/4) is positive, v decays like e^{-a|t|} at both
ends, and the critical rescaling W -> λ^a W(λ·) is a translation in t. That
makes a periodic FFT Petviashvili iteration well posed: no boundary layer at
r = 0, no truncation at large r, and no drift in the scale. ‖ΔW‖² and the
potential term are spectrally exact integrals in t:

    ‖ΔW‖² = ω ∫ |(D - a)(D + N/2) v|² dt,    ∫|x|^{-b} W^p = ω ∫ v^p dt.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateField, HypothesesNotMet, NoConvergence
from .functionals import energy_from, report
from .grid import RadialField, RadialGrid, sphere_area
from .model import ModelParams


@dataclass(frozen=True)
class LogProfile:
    """v(t) on a periodic grid t in [-T, T), with W(r) = r^{-a} v(ln r)."""
    params: ModelParams
    t: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)

    @property
    def a(self) -> float:
        return self.params.scaling_exponent

    @property
    def period(self) -> float:
        return self.t.size * (self.t[1] - self.t[0])

    def _coeffs(self):
        return np.fft.rfft(self.v) / self.t.size

    def eval_v(self, tt) -> np.ndarray:
        """Trigonometric interpolant of v at arbitrary t (in chunks)."""
        tt = np.atleast_1d(np.asarray(tt, dtype=float))
        c = self._coeffs()
        n = self.t.size
        k = 2.0 * np.pi * np.arange(c.size) / self.period
        wts = np.full(c.size, 2.0)
        wts[0] = 1.0
        if n % 2 == 0:
            wts[-1] = 1.0
        out = np.empty(tt.size)
        for i in range(0, tt.size, 512):
            x = tt[i:i + 512, None] - self.t[0]
            out[i:i + 512] = np.real(np.exp(1j * k * x) @ (wts * c))
        return out

    def W(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return r ** (-self.a) * self.eval_v(np.log(r)).reshape(r.shape)

    def W0(self, t_probe: float | None = None) -> float:
        """W(0) = lim_{t -> -inf} e^{-at} v(t).

        The default probe balances the O(r²) bias of W(r) against the
        roundoff amplified by e^{-at}.
        """
        if t_probe is None:
            t_probe = np.log(1e-16) / (2.0 + self.a)
        return float(np.exp(-self.a * t_probe) * self.eval_v([t_probe])[0])

    def shifted(self, t0: float) -> "LogProfile":
        """Profile of W_λ = λ^a W(λ·) with λ = e^{t0}: v(t) -> v(t + t0)."""
        k = 2.0 * np.pi * np.fft.rfftfreq(self.t.size, d=self.t[1] - self.t[0])
        v = np.fft.irfft(np.fft.rfft(self.v) * np.exp(1j * k * t0), n=self.t.size)
        return LogProfile(self.params, self.t, v)


def _symbols(params: ModelParams, n: int, T: float):
    a, N = params.scaling_exponent, params.N
    t = np.linspace(-T, T, n, endpoint=False)
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=t[1] - t[0])
    sym = (k ** 2 + a ** 2) * (k ** 2 + 0.25 * N ** 2)
    lap_sym = (1j * k - a) * (1j * k + 0.5 * N)   # ΔW = r^{-a-2} (D-a)(D+N/2) v
    return t, sym, lap_sym


def petviashvili_log(params: ModelParams, n_t: int = 2048, T: float | None = None,
                     tol: float = 1e-9, max_iter: int = 3000,
                     seed_width: float = 1.0):
    """Petviashvili iteration for the log-variable profile.

    v <- γ^θ · P^{-1}(|v|^alpha v),  γ = <Pv, v>/<|v|^alpha v, v>,  θ = q/(q-1).
    Returns (t, v, residual, gamma, iterations); raises NoConvergence.
    """
    a, alpha, q = params.scaling_exponent, params.alpha, params.q
    if T is None:
        T = 36.0 / a + 10.0
    t, sym, _ = _symbols(params, n_t, T)
    theta = q / (q - 1.0)
    v = np.exp(-(t / seed_width) ** 2)
    res, g = np.inf, np.nan
    for it in range(1, max_iter + 1):
        nl = np.abs(v) ** alpha * v
        V, F = np.fft.fft(v), np.fft.fft(nl)
        g = np.sum(sym * np.abs(V) ** 2) / np.real(np.sum(F * np.conj(V)))
        if not np.isfinite(g) or g <= 0:
            raise NoConvergence(f"stabilizing factor degenerated at iteration {it}")
        v = g ** theta * np.real(np.fft.ifft(F / sym))
        Pv = np.real(np.fft.ifft(sym * np.fft.fft(v)))
        res = np.linalg.norm(Pv - np.abs(v) ** alpha * v) / np.linalg.norm(Pv)
        if res < tol:
            return t, v, float(res), float(g), it
    raise NoConvergence(f"residual {res:.3e} after {max_iter} iterations "
                        f"(seed width {seed_width})")


def log_profile_integrals(params: ModelParams, prof: LogProfile) -> tuple:
    """(‖ΔW‖², ∫|x|^{-b}W^p, fixed-point residual) from the log profile."""
    n = prof.t.size
    T = -prof.t[0]
    _, sym, lap_sym = _symbols(params, n, T)
    dt = prof.t[1] - prof.t[0]
    om = sphere_area(params.N)
    V = np.fft.fft(prof.v)
    kin = om * dt * np.sum(np.abs(np.fft.ifft(lap_sym * V)) ** 2)
    pot = om * dt * np.sum(np.abs(prof.v) ** params.p)
    Pv = np.real(np.fft.ifft(sym * V))
    res = np.linalg.norm(Pv - np.abs(prof.v) ** params.alpha * prof.v) / np.linalg.norm(Pv)
    return float(kin), float(pot), float(res)


@dataclass(frozen=True)
class GroundStateResult:
    W: RadialField
    kinetic_W: float
    potential_W: float
    energy_W: float
    k_opt: float
    residual: float
    gamma_final: float
    iterations: int
    profile: LogProfile = field(repr=False)

    @property
    def params(self) -> ModelParams:
        return self.profile.params

    def on_grid(self, grid: RadialGrid) -> RadialField:
        """W sampled on another grid with the same (N, b)."""
        if grid.params != self.params:
            raise ValueError("grid parameters differ from the ground state's")
        return RadialField(grid, self.profile.W(grid.nodes).astype(complex))

    def pohozaev_residuals(self) -> dict:
        """Relative defects of ‖ΔW‖² = ∫|x|^{-b}W^p, E(W) = (4-b)/(2(N-b))‖ΔW‖²
        and K_opt = ‖ΔW‖^{-(8-2b)/(N-4)}."""
        P = self.params
        k_formula = self.kinetic_W ** (-(4.0 - P.b) / (P.N - 4))
        return {
            "potential_vs_kinetic": abs(self.potential_W / self.kinetic_W - 1.0),
            "energy_vs_kinetic": abs(self.energy_W - P.pohozaev_coeff * self.kinetic_W)
            / (P.pohozaev_coeff * self.kinetic_W),
            "k_opt": abs(self.k_opt - k_formula) / self.k_opt,
        }

    def summary(self) -> dict:
        return {"kinetic_W": self.kinetic_W, "energy_W": self.energy_W,
                "k_opt": self.k_opt, "residual": self.residual,
                "potential_W": self.potential_W, "gamma_final": self.gamma_final,
                "iterations": self.iterations, "W0": self.profile.W0(),
                **self.params.as_dict()}


def _normalize(prof: LogProfile, mode: str) -> LogProfile:
    if mode == "core":
        # put the maximum of v at t = 0; transition radius of W near 1
        i = int(np.argmax(prof.v))
        h = prof.t[1] - prof.t[0]
        y0, y1, y2 = prof.v[i - 1], prof.v[i], prof.v[i + 1]
        t_peak = prof.t[i] + 0.5 * h * (y0 - y2) / (y0 - 2.0 * y1 + y2)
        return prof.shifted(t_peak)
    if mode == "peak":
        # W(0) = 1: W_λ(0) = λ^a W(0)
        t0 = -np.log(prof.W0()) / prof.a
        return prof.shifted(t0)
    raise ValueError(f"unknown normalization {mode!r}")


def solve_ground_state(grid: RadialGrid, opts: dict | None = None) -> GroundStateResult:
    """Compute W, certify the Pohozaev identities, and sample W on ``grid``.

    opts: tol (1e-9), max_iter (3000), seed_width (1.0, in t = ln r),
    restarts (3, halving the seed width each time), n_t (2048),
    normalize ("core" puts the core at r ~ 1, "peak" sets W(0) = 1).
    """
    o = {"tol": 1e-9, "max_iter": 3000, "seed_width": 1.0, "restarts": 3,
         "n_t": 2048, "normalize": "core"}
    o.update(opts or {})
    params = grid.params
    width = float(o["seed_width"])
    last = None
    for _ in range(int(o["restarts"]) + 1):
        try:
            t, v, res, g, it = petviashvili_log(params, n_t=int(o["n_t"]), tol=o["tol"],
                                                max_iter=int(o["max_iter"]),
                                                seed_width=width)
            break
        except NoConvergence as exc:
            last = exc
            width *= 0.5
    else:
        raise NoConvergence(f"no convergence after {o['restarts']} restarts: {last}")
    prof = _normalize(LogProfile(params, t, v), o["normalize"])
    kin, pot, res = log_profile_integrals(params, prof)
    W = RadialField(grid, prof.W(grid.nodes).astype(complex))
    return GroundStateResult(
        W=W, kinetic_W=kin, potential_W=pot, energy_W=energy_from(params, kin, pot),
        k_opt=pot / kin ** (params.p / 2.0), residual=res, gamma_final=g,
        iterations=it, profile=prof)


def weinstein(f: RadialField, grid: RadialGrid | None = None) -> float:
    """J(f) = ‖Δf‖^p / ∫|x|^{-b}|f|^p; its infimum is 1/K_opt, attained at W."""
    rep = report(f, grid)
    if not rep.potential > 0.0:
        raise DegenerateField("potential term vanishes")
    p = (grid or f.grid).params.p
    return rep.kinetic ** (p / 2.0) / rep.potential


def coercivity_gap(f: RadialField, gs: GroundStateResult, form: str = "ground_state",
                   grid: RadialGrid | None = None) -> float:
    """δ > 0 with E(u(t)) <= (1-δ)(4-b)/(2(N-b))‖Δu(t)‖² along the flow.

    form="ground_state": δ = 1 - E(f)/E(W). Since E is conserved and
    ‖Δu(t)‖ stays above ‖ΔW‖, this δ works at every time.
    form="instantaneous": δ = 1 - E(f)·2(N-b)/((4-b)‖Δf‖²), the largest δ
    valid at f itself.
    Requires 0 < E(f) < E(W) and ‖Δf‖ > ‖ΔW‖; raises HypothesesNotMet naming
    whichever fails.
    """
    rep = report(f, grid)
    failed = []
    if not rep.energy > 0.0:
        failed.append("energy_not_positive")
    if not rep.energy < gs.energy_W:
        failed.append("energy_not_below_ground_state")
    if not rep.kinetic > gs.kinetic_W:
        failed.append("kinetic_not_above_ground_state")
    if failed:
        raise HypothesesNotMet("coercivity hypotheses fail: " + ", ".join(failed), failed)
    if form == "ground_state":
        return 1.0 - rep.energy / gs.energy_W
    if form == "instantaneous":
        return 1.0 - rep.energy / (gs.params.pohozaev_coeff * rep.kinetic)
    raise ValueError(f"unknown form {form!r}")


def variational_function(x, gs: GroundStateResult) -> np.ndarray:
    """f(x) = x²/2 - (N-4)/(2(N-b)) x^p / ‖ΔW‖^{p-2}: the lower bound of E(u)
    in terms of x = ‖Δu‖. Its maximum is E(W), attained at x = ‖ΔW‖."""
    P = gs.params
    x = np.asarray(x, dtype=float)
    return 0.5 * x ** 2 - P.energy_coeff * x ** P.p / gs.kinetic_W ** ((P.p - 2.0) / 2.0)
