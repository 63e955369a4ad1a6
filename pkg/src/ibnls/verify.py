"""Identity and inequality suites behind the ``verify`` subcommand.

Every check returns {"passed": bool, "detail": str, ...measured values}.
"""
from __future__ import annotations

import numpy as np

from .cutoff import CutoffProfile, make_cutoff, scaling_certificate
from .functionals import inequality_report, random_smooth_field, report
from .ground_state import GroundStateResult, weinstein
from .virial import rate_exact, rate_exact_energy_form, rate_localized


def _check(passed, detail, **values) -> dict:
    return {"passed": bool(passed), "detail": detail, **values}


def pohozaev_check(gs: GroundStateResult, residual_tol=1e-8, identity_tol=1e-4) -> dict:
    res = gs.pohozaev_residuals()
    worst = max(res.values())
    ok = gs.residual < residual_tol and worst < identity_tol
    return _check(ok, f"residual {gs.residual:.2e}, worst identity {worst:.2e}",
                  residual=gs.residual, identities=res)


def cutoff_property_violations(c: CutoffProfile, atol: float = 1e-12) -> dict:
    """Largest violation of each pointwise cut-off property over the grid nodes.

    inside      φ_R = r², φ_R' = 2r, φ_R'' = 2 for r <= R (relative to R², R, 1)
    big_phi     |Φ_R - 16| for r <= R
    signs       φ_R' >= 0, φ_R'' <= 2, φ_R' - r φ_R'' >= 0 everywhere
    support     φ_R^(k) = 0 for k >= 1 beyond 2R, and k = 3..6 inside R
    """
    r = c.grid.nodes
    R = c.R
    d = c.derivs
    ins, far = r <= R, r >= 2.0 * R

    def worst(x):
        return float(np.max(np.abs(x))) if x.size else 0.0

    inside = max(worst((d[0] - r ** 2)[ins]) / R ** 2, worst((d[1] - 2 * r)[ins]) / R,
                 worst((d[2] - 2.0)[ins]))
    signs = max(0.0, float(np.max(-d[1])), float(np.max(d[2] - 2.0)),
                float(np.max(-(d[1] - r * d[2]))) / R)
    support = max([worst(d[k][far]) * R ** (k - 2) for k in range(1, 7)]
                  + [worst(d[k][ins]) * R ** (k - 2) for k in range(3, 7)])
    return {"inside": inside, "big_phi": worst(c.big_phi[ins] - 16.0),
            "signs": signs, "support": support}


def cutoff_check(c: CutoffProfile, atol: float = 1e-12) -> dict:
    v = cutoff_property_violations(c)
    ok = all(x <= atol for x in v.values())
    return _check(ok, ", ".join(f"{k} {x:.1e}" for k, x in v.items()), violations=v)


def scaling_check(R_values=(5.0, 10.0, 20.0), spread_tol=0.05, grid=None) -> dict:
    consts = {j: scaling_certificate(R_values, j, grid) for j in range(1, 7)}
    spread = {j: max(v) / min(v) - 1.0 for j, v in consts.items()}
    worst = max(spread.values())
    return _check(worst < spread_tol, f"worst relative spread {worst:.2e}",
                  constants=consts, spread=spread)


def localization_check(grid, R: float, tol=1e-3) -> dict:
    """A Gaussian concentrated well inside R/2: localized rate equals the exact one."""
    c = make_cutoff(grid, R)
    w = R / 12.0
    u = grid.field(2.0 * np.exp(-(grid.nodes / w) ** 2))
    exact = rate_exact(u)
    loc = rate_localized(u, c).rate_localized
    rel = abs(loc - exact) / abs(exact)
    alt = abs(rate_exact_energy_form(u) - exact) / abs(exact)
    return _check(rel < tol and alt < 1e-10,
                  f"localized vs exact {rel:.2e}, two exact forms {alt:.2e}",
                  rel_error=rel, forms_error=alt)


def inequality_check(grid, gs: GroundStateResult, rng, samples: int = 100,
                     R: float | None = None, tol=1e-3) -> dict:
    p = grid.params.p
    R = R if R is not None else grid.r_max / 8.0
    jw = 1.0 / gs.k_opt
    interp, sob, jmin = [], [], np.inf
    for _ in range(samples):
        f = random_smooth_field(grid, rng)
        ratios = inequality_report(f, R, k_opt=gs.k_opt)
        interp.append(ratios["interp_ratio"])
        sob.append(ratios["sobolev_ratio"])
        jmin = min(jmin, weinstein(f))
    ok = max(interp) <= 1.0 and max(sob) <= 1.0 + tol and jmin >= jw * (1.0 - tol)
    return _check(ok, f"max interp {max(interp):.4f}, max sobolev {max(sob):.4f}, "
                      f"min J/J(W) {jmin / jw:.4f}",
                  max_interp=max(interp), max_sobolev=max(sob), min_J_ratio=jmin / jw)


def run_checks(grid, gs: GroundStateResult, rng, R: float, samples: int = 100):
    """All suites; returns (report dict, the cut-off used) for CSV dumping."""
    c = make_cutoff(grid, R)
    checks = {
        "pohozaev": pohozaev_check(gs),
        "cutoff_properties": cutoff_check(c),
        "cutoff_scaling": scaling_check(),
        "localization": localization_check(grid, R),
        "inequalities": inequality_check(grid, gs, rng, samples),
    }
    return {"passed": all(v["passed"] for v in checks.values()), "checks": checks,
            "mass_of_W_on_grid": report(gs.on_grid(grid)).mass}, c
