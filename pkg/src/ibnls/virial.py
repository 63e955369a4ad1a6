"""Morawetz potential and its time derivative along the flow.

    V_φ(t) = -2 Im ∫ ∇φ·∇u ū dx

For radial φ and u the derivative identity has six terms,

    V' = -4 ∫ (Δφ)'' |u_r|²                                  (hessian_lap)
         + ∫ Δ³φ |u|²                                         (delta3)
         + 8 ∫ [φ''|u_rr|² + (N-1)(φ'/r)|u_r/r|²]             (triple)
         - 2 ∫ Δ²φ |u_r|²                                     (delta2)
         - (8-2b)/(N-b) ∫ Δφ |x|^{-b}|u|^p                    (nl_laplacian)
         - 2b(N-4)/(N-b) ∫ (φ'/r) |x|^{-b}|u|^p               (nl_weight)

using Σ ∂_jkψ ∂_j u ∂_k ū = ψ''|u_r|² and Hess u = u_rr x̂x̂ᵀ + (u_r/r)(I - x̂x̂ᵀ)
for radial functions. The two nonlinear terms add up to -∫ Φ_R |x|^{-b}|u|^p.

The triple term is evaluated split,

    8 [2‖Δu‖² + ∫ (φ''-2)|u_rr|² + (N-1)(φ'/r - 2)|u_r/r|²],

since ∫ |u_rr|² + (N-1)|u_r/r|² = ‖Δu‖² for decaying radial u. The first
piece is the same discrete ‖Δu‖² as the energy; the correction is supported
in r >= R where stencil derivatives are accurate. For fields inside the ball
the localized rate then reduces to 16‖Δu‖² - 16∫|x|^{-b}|u|^p on the nose.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cutoff import CutoffProfile
from .errors import GridMismatch
from .functionals import report
from .grid import RadialField, RadialGrid, sphere_area

TERM_NAMES = ("hessian_lap", "delta3", "triple", "delta2", "nl_laplacian", "nl_weight")


@dataclass(frozen=True)
class VirialReport:
    V: float
    rate_exact: float
    rate_localized: float
    rate_bound_main: float
    tail_error: float
    remainder_terms: tuple = field(default=())   # the six terms in TERM_NAMES order

    def terms(self) -> dict:
        return dict(zip(TERM_NAMES, self.remainder_terms))


def _pair(f, c: CutoffProfile):
    grid = c.grid
    if isinstance(f, RadialField) and not grid.same_as(f.grid):
        raise GridMismatch("field and cut-off live on different grids")
    return grid, grid._check(f)


def morawetz(f, c: CutoffProfile) -> float:
    """V = -2 Im ∫ φ_R'(r) ∂_r f  f̄ dx."""
    grid, u = _pair(f, c)
    return float(-2.0 * np.imag(np.sum(grid.weights * c.dphi * grid.d_r(u) * np.conj(u))))


def rate_exact(f, grid: RadialGrid | None = None) -> float:
    """Unlocalized rate (φ = r²): 16‖Δf‖² - 16∫|x|^{-b}|f|^p."""
    rep = report(f, grid)
    return 16.0 * rep.kinetic - 16.0 * rep.potential


def rate_exact_energy_form(f, grid: RadialGrid | None = None) -> float:
    """Same quantity written as 32(N-b)/(N-4) E - 16(4-b)/(N-4) ‖Δf‖²."""
    grid = grid or f.grid
    rep = report(f, grid)
    N, b = grid.params.N, grid.params.b
    return 32.0 * (N - b) / (N - 4) * rep.energy - 16.0 * (4.0 - b) / (N - 4) * rep.kinetic


def triple_contraction_density(f, c: CutoffProfile) -> np.ndarray:
    """Σ_ijk ∂_jkφ ∂_ik u ∂_ij ū pointwise, in the expanded form with

    a = φ'/r, bb = (φ'' - φ'/r)/r², A = u_r/r, B = (u_rr - u_r/r)/r²:
    N a|A|² + r²(2a Re(A B̄) + bb|A|²) + r⁴(a|B|² + 2bb Re(A B̄)) + bb r⁶|B|².
    """
    grid, u = _pair(f, c)
    r = grid.nodes
    ur, urr = grid.d_r(u), grid.d_rr(u)
    a = c.dphi / r
    bb = (c.d2phi - a) / r ** 2
    A = ur / r
    B = (urr - A) / r ** 2
    re_ab = np.real(A * np.conj(B))
    N = grid.N
    return (N * a * np.abs(A) ** 2 + r ** 2 * (2.0 * a * re_ab + bb * np.abs(A) ** 2)
            + r ** 4 * (a * np.abs(B) ** 2 + 2.0 * bb * re_ab) + bb * r ** 6 * np.abs(B) ** 2)


def localized_terms(f, c: CutoffProfile) -> dict:
    """The six terms of the localized virial derivative (see module docstring)."""
    grid, u = _pair(f, c)
    params = grid.params
    N, b, p = params.N, params.b, params.p
    r = grid.nodes
    ur, urr = grid.d_r(u), grid.d_rr(u)
    ur2 = np.abs(ur) ** 2
    kin = report(u, grid).kinetic
    outside = r > c.R
    corr = np.where(outside, (c.d2phi - 2.0) * np.abs(urr) ** 2
                    + (N - 1) * (c.dphi / r - 2.0) * np.abs(ur / r) ** 2, 0.0)
    dens = np.abs(u) ** p
    return {
        "hessian_lap": -4.0 * grid.integrate(c.delta_phi_rr * ur2),
        "delta3": grid.integrate(c.delta3_phi * np.abs(u) ** 2),
        "triple": 8.0 * (2.0 * kin + grid.integrate(corr)),
        "delta2": -2.0 * grid.integrate(c.delta2_phi * ur2),
        "nl_laplacian": -(8.0 - 2.0 * b) / (N - b) * grid.integrate_singular(c.delta_phi * dens),
        "nl_weight": -2.0 * b * (N - 4) / (N - b) * grid.integrate_singular(c.dphi / r * dens),
    }


def tail_error(f, c: CutoffProfile) -> float:
    """E_r = ∫_{|x|>R} (Φ_R - 16) |x|^{-b} |u|^p dx."""
    grid, u = _pair(f, c)
    ext = grid.nodes > c.R
    return grid.integrate_singular(np.where(ext, (c.big_phi - 16.0) * np.abs(u) ** grid.params.p, 0.0))


def strauss_constant(N: int) -> float:
    """C with sup_{r>R}|u| <= C R^{-(N-1)/2} ‖u‖^{1/2}‖∇u‖^{1/2} for radial u.

    From r^{N-1}|u(r)|² <= 2∫_r^∞ |u||u_s| s^{N-1} ds <= (2/ω)‖u‖‖∇u‖.
    """
    return float(np.sqrt(2.0 / sphere_area(N)))


def bound_constants(c: CutoffProfile) -> dict:
    """c1, c2, c3 of the error budget, read off the cut-off tabulation.

    |delta3|                   <= c1 R^{-4} M,        c1 = R⁴ sup|Δ³φ_R|
    |hessian_lap| + |delta2|   <= c2 R^{-2} ‖∇u‖²,    c2 = R²(4 sup|(Δφ_R)''| + 2 sup|Δ²φ_R|)
    |E_r|                      <= c3 R^{-b-(N-1)(4-b)/(N-4)} ‖∇u‖^{(4-b)/(N-4)},
                                  c3 = sup|Φ_R - 16| C_S^alpha M^{1+alpha/4} (mass applied later)
    The triple-term correction is <= 0 because φ'' <= 2 and φ'/r <= 2.
    """
    R = c.R
    ext = c.grid.nodes > R
    return {
        "c1": R ** 4 * float(np.max(np.abs(c.delta3_phi))),
        "c2": R ** 2 * (4.0 * float(np.max(np.abs(c.delta_phi_rr)))
                        + 2.0 * float(np.max(np.abs(c.delta2_phi)))),
        "sup_phi_dev": float(np.max(np.abs(c.big_phi[ext] - 16.0))) if np.any(ext) else 0.0,
    }


def rate_bound(f, c: CutoffProfile) -> dict:
    """Upper bound on the localized rate: main term plus a measured error budget.

    main = 32(N-b)/(N-4) E - 16(4-b)/(N-4) ‖Δf‖².
    """
    grid, u = _pair(f, c)
    params = grid.params
    N, b, alpha = params.N, params.b, params.alpha
    rep = report(u, grid)
    R = c.R
    k = bound_constants(c)
    main = 32.0 * (N - b) / (N - 4) * rep.energy - 16.0 * (4.0 - b) / (N - 4) * rep.kinetic
    grad_st = grid.integrate(np.abs(grid.d_r(u)) ** 2)   # the norm the terms actually use
    g = max(rep.grad_sq, grad_st)
    c3 = k["sup_phi_dev"] * strauss_constant(N) ** alpha * rep.mass ** (1.0 + alpha / 4.0)
    budget = (k["c1"] * R ** -4 * rep.mass + k["c2"] * R ** -2 * g
              + c3 * R ** (-b - (N - 1) * (4.0 - b) / (N - 4)) * g ** ((4.0 - b) / (2.0 * (N - 4))))
    return {"main": float(main), "error_budget": float(budget), "c1": k["c1"], "c2": k["c2"],
            "c3": float(c3)}


def virial_report(f, c: CutoffProfile) -> VirialReport:
    terms = localized_terms(f, c)
    vals = tuple(terms[name] for name in TERM_NAMES)
    return VirialReport(
        V=morawetz(f, c),
        rate_exact=rate_exact(f, c.grid),
        rate_localized=float(sum(vals)),
        rate_bound_main=rate_bound(f, c)["main"],
        tail_error=tail_error(f, c),
        remainder_terms=vals,
    )


def rate_localized(f, c: CutoffProfile) -> VirialReport:
    """Full localized rate with its six terms; see ``virial_report``."""
    return virial_report(f, c)
