"""Mass, energy and the norms entering the energy, plus inequality ratios.

    M(u) = ∫|u|²,   E(u) = ½‖Δu‖² − (N−4)/(2(N−b)) ∫|x|^{-b}|u|^p.

All integrals use the grid quadrature; the singular factor |x|^{-b} goes
through the exact cell integrals of r^{N-1-b}.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateField, InvalidGridSpec
from .grid import RadialField, RadialGrid


@dataclass(frozen=True)
class FunctionalReport:
    mass: float
    kinetic: float      # ‖Δu‖²
    grad_sq: float      # ‖∇u‖²
    potential: float    # ∫|x|^{-b}|u|^p
    energy: float

    def as_dict(self) -> dict:
        return asdict(self)


def _values(grid: RadialGrid, f) -> np.ndarray:
    return grid._check(f)


def kinetic(grid: RadialGrid, f, method: str = "quadrature") -> float:
    """‖Δf‖², either as ∫|Δf|² or as Re⟨Δ²f, f⟩.

    The discrete Laplacian is symmetric in the weighted inner product, so the
    two agree to rounding.
    """
    u = _values(grid, f)
    if method == "quadrature":
        return grid.norm_sq(grid.laplacian(u))
    if method == "bilaplacian":
        return float(np.real(grid.inner(grid.bilaplacian(u), u)))
    raise ValueError(f"unknown kinetic method {method!r}")


def potential(grid: RadialGrid, f) -> float:
    u = _values(grid, f)
    return grid.integrate_singular(np.abs(u) ** grid.params.p)


def energy_from(params, kin: float, pot: float) -> float:
    return 0.5 * kin - params.energy_coeff * pot


def report(f: RadialField, grid: RadialGrid | None = None,
           method: str = "quadrature") -> FunctionalReport:
    grid = grid or f.grid
    u = _values(grid, f)
    kin = kinetic(grid, u, method)
    pot = potential(grid, u)
    return FunctionalReport(
        mass=grid.norm_sq(u),
        kinetic=kin,
        grad_sq=grid.grad_sq(u),
        potential=pot,
        energy=energy_from(grid.params, kin, pot),
    )


def inequality_report(f: RadialField, R: float, k_opt: float | None = None,
                      grid: RadialGrid | None = None) -> dict:
    """Ratios that the interpolation, Strauss and sharp Sobolev bounds keep finite.

    interp_ratio  = ‖∇f‖² / (‖Δf‖ ‖f‖)                      (≤ 1)
    strauss_ratio = sup_{r>R}|f| / (R^{-(N-1)/2} ‖f‖^{1/2} ‖∇f‖^{1/2})
    sobolev_ratio = ∫|x|^{-b}|f|^p / (K_opt ‖Δf‖^p)          (≤ 1)

    sobolev_ratio is present only when ``k_opt`` is given.
    """
    grid = grid or f.grid
    if not 0.0 < R < grid.r_max:
        raise InvalidGridSpec(f"need 0 < R < r_max = {grid.r_max}, got R = {R}")
    rep = report(f, grid)
    if rep.mass == 0.0 or rep.kinetic == 0.0 or rep.grad_sq == 0.0:
        raise DegenerateField("field is zero (or constant); the ratios are undefined")
    N, p = grid.params.N, grid.params.p
    u = np.abs(_values(grid, f))
    ext = grid.nodes > R
    sup_ext = float(u[ext].max()) if np.any(ext) else 0.0
    out = {
        "interp_ratio": rep.grad_sq / np.sqrt(rep.kinetic * rep.mass),
        "strauss_ratio": sup_ext / (R ** (-(N - 1) / 2.0)
                                    * rep.mass ** 0.25 * rep.grad_sq ** 0.25),
    }
    if k_opt is not None:
        out["sobolev_ratio"] = rep.potential / (k_opt * rep.kinetic ** (p / 2.0))
    return out


def exterior_interp_ratio(f: RadialField, R: float, grid: RadialGrid | None = None) -> float:
    """‖∇f‖_{r>R} / (‖Δf‖_{r>R}^{1/2} ‖f‖_{r>R}^{1/2}), quadrature restricted to r > R."""
    grid = grid or f.grid
    u = _values(grid, f)
    ext = grid.nodes > R
    if ext.sum() < 4:
        raise InvalidGridSpec(f"too few nodes beyond R = {R}")
    w = grid.weights * ext
    lap = grid.laplacian(u)
    du = grid.d_r(u)
    m = np.sum(w * np.abs(u) ** 2)
    k = np.sum(w * np.abs(lap) ** 2)
    g = np.sum(w * np.abs(du) ** 2)
    if m == 0.0 or k == 0.0:
        raise DegenerateField("field vanishes beyond R")
    return float(np.sqrt(g) / (k * m) ** 0.25)


def random_smooth_field(grid: RadialGrid, rng: np.random.Generator,
                        terms: int = 3, width_range=(0.4, 3.0)) -> RadialField:
    """Random complex sum of c·(r/w)^{2m}·exp(-(r/w)²)·e^{iκr²}, m in {0, 1, 2}.

    Each term is an even smooth function of r (smooth on R^N), resolved on
    the grid and negligible at r_max.
    """
    r = grid.nodes
    hi = min(width_range[1], grid.r_max / 10.0)
    lo = max(min(width_range[0], hi / 2.0), 8.0 * grid.h)
    if lo > hi:
        raise InvalidGridSpec(f"grid spacing {grid.h:.3g} too coarse for random fields "
                              f"below r_max/10 = {hi:.3g}")
    u = np.zeros(grid.n, dtype=complex)
    for _ in range(terms):
        w = rng.uniform(lo, hi)
        m = rng.integers(0, 3)
        kappa = rng.uniform(-0.5, 0.5) / w ** 2
        c = rng.normal() + 1j * rng.normal()
        s = r / w
        u += c * s ** (2 * m) * np.exp(-s * s + 1j * kappa * r * r)
    return RadialField(grid, u)
