"""Radial cut-off φ_R(r) = R² φ(r/R), φ(s) = ∫_0^s χ.

The profile χ is

    2s                        on [0, 1]
    2s - 2(s-1)²              on (1, 1 + 1/√2)
    strictly decreasing       on (1 + 1/√2, 2)
    0                         for s >= 2

The printed joints are only C¹, so both are blended with a C⁶ smoothstep
that starts exactly at the joint. That keeps φ_R = r² identically for r <= R.
The decreasing bridge is (2-s)^7 times a linear factor fitted to the value
and slope at 1 + 1/√2. Every piece is a polynomial in s, so derivatives of
all orders are exact.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from math import comb, sqrt

import numpy as np
from numpy.polynomial import Polynomial as P

from .errors import CutoffTooLarge
from .grid import RadialGrid

JOINT = 1.0 + 1.0 / sqrt(2.0)
BRIDGE_ORDER = 7
MAX_DERIV = 6


def smoothstep(order: int = 6) -> P:
    """Polynomial step on [0, 1] with derivatives 1..order vanishing at both ends."""
    x = P([0.0, 1.0])
    out = P([0.0])
    for k in range(order + 1):
        out = out + comb(order + k, k) * comb(2 * order + 1, order - k) * (-x) ** k
    return out * x ** (order + 1)


class ChiProfile:
    """Piecewise-polynomial χ and its antiderivative φ on s >= 0."""

    def __init__(self, mollify: float = 0.1):
        if not 0.0 < mollify < min(JOINT - 1.0, 2.0 - JOINT) / 2:
            raise ValueError(f"mollify width {mollify} does not fit between the joints")
        self.mollify = eps = mollify
        x = P([0.0, 1.0])                      # local coordinate s - (left break)

        def quad(shift):                       # 2s - 2(s-1)² at s = shift + x
            return 2 * (x + shift) - 2 * (x + shift - 1.0) ** 2

        H = smoothstep()(x / eps)              # 0 -> 1 on x in [0, eps]
        d = 2.0 - JOINT
        q0 = quad(JOINT)(0.0)
        q1 = quad(JOINT).deriv()(0.0)
        c0 = q0 / d ** BRIDGE_ORDER
        c1 = (q1 + BRIDGE_ORDER * q0 / d) / d ** BRIDGE_ORDER

        def bridge(shift):                     # (2-s)^7 (c0 + c1 (s-J)) at s = J + shift + x
            return (d - shift - x) ** BRIDGE_ORDER * (c0 + c1 * (x + shift))

        self.breaks = np.array([0.0, 1.0, 1.0 + eps, JOINT, JOINT + eps, 2.0])
        self.chi_pieces = [
            2 * x,
            2 * (1.0 + x) - 2 * x ** 2 * H,
            quad(1.0 + eps),
            (1 - H) * quad(JOINT) + H * bridge(0.0),
            bridge(eps),
            P([0.0]),
        ]
        # φ = ∫χ, continuous across breaks
        self.phi_pieces = []
        acc = 0.0
        for i, chi in enumerate(self.chi_pieces):
            anti = chi.integ()
            self.phi_pieces.append(anti + acc)
            if i + 1 < len(self.breaks):
                acc = acc + anti(self.breaks[i + 1] - self.breaks[i])
        # phi_derivs[k][piece] = φ^{(k)} in the local coordinate
        self.phi_derivs = [self.phi_pieces]
        for _ in range(MAX_DERIV + 2):
            self.phi_derivs.append([pc.deriv() for pc in self.phi_derivs[-1]])

    def phi_deriv(self, s, k: int) -> np.ndarray:
        """k-th derivative of φ at s (k = 0..8)."""
        s = np.asarray(s, dtype=float)
        idx = np.searchsorted(self.breaks, s, side="right") - 1
        idx = np.clip(idx, 0, len(self.breaks) - 1)
        out = np.empty_like(s)
        for j, pc in enumerate(self.phi_derivs[k]):
            m = idx == j
            if np.any(m):
                out[m] = pc(s[m] - self.breaks[j])
        return out

    def chi(self, s) -> np.ndarray:
        return self.phi_deriv(s, 1)


_DEFAULT_CHI = None


def default_chi() -> ChiProfile:
    global _DEFAULT_CHI
    if _DEFAULT_CHI is None:
        _DEFAULT_CHI = ChiProfile()
    return _DEFAULT_CHI


def _radial_laplacian_terms(terms: dict, N: int) -> dict:
    """Apply Δ = ∂_r² + (N-1)/r ∂_r to Σ c · ψ^{(k)} r^{-m}, keyed (k, m)."""
    def d(ts):
        out = {}
        for (k, m), c in ts.items():
            out[(k + 1, m)] = out.get((k + 1, m), 0.0) + c
            if m:
                out[(k, m + 1)] = out.get((k, m + 1), 0.0) - m * c
        return out

    first = d(terms)
    second = d(first)
    out = dict(second)
    for (k, m), c in first.items():
        out[(k, m + 1)] = out.get((k, m + 1), 0.0) + (N - 1) * c
    return {key: c for key, c in out.items() if c != 0.0}


def _eval_terms(terms: dict, derivs: list, r: np.ndarray) -> np.ndarray:
    out = np.zeros_like(r)
    for (k, m), c in terms.items():
        out += c * derivs[k] / r ** m
    return out


def radial_profile_table(chi: ChiProfile, R: float, N: int, r: np.ndarray) -> dict:
    """Tabulate φ_R and its radial and iterated-Laplacian data at radii r > 0."""
    r = np.asarray(r, dtype=float)
    R = float(R)
    s = r / R
    derivs = [R ** (2 - k) * chi.phi_deriv(s, k) for k in range(MAX_DERIV + 3)]
    inside = r <= R
    for k, exact in enumerate([r ** 2, 2 * r, np.full_like(r, 2.0)]):
        derivs[k] = np.where(inside, exact, derivs[k])
    for k in range(3, MAX_DERIV + 3):
        derivs[k] = np.where(inside, 0.0, derivs[k])

    lap1 = _radial_laplacian_terms({(0, 0): 1.0}, N)
    lap2 = _radial_laplacian_terms(lap1, N)
    lap3 = _radial_laplacian_terms(lap2, N)

    def dd(ts):  # ∂_r² of a term expansion
        out = {}
        for (k, m), c in ts.items():
            for kk, mm, cc in ((k + 2, m, c), (k + 1, m + 1, -2 * m * c),
                               (k, m + 2, m * (m + 1) * c)):
                if cc:
                    out[(kk, mm)] = out.get((kk, mm), 0.0) + cc
        return out

    # the expansions cancel badly near the origin; the ball r <= R is exact
    outside = ~inside
    ro = np.where(outside, r, 1.0)
    lap_phi = np.where(inside, 2.0 * N, _eval_terms(lap1, derivs, ro))
    lap2_phi = np.where(inside, 0.0, _eval_terms(lap2, derivs, ro))
    lap3_phi = np.where(inside, 0.0, _eval_terms(lap3, derivs, ro))
    lap_phi_rr = np.where(inside, 0.0, _eval_terms(dd(lap1), derivs, ro))
    return {"derivs": derivs, "delta_phi": lap_phi, "delta2_phi": lap2_phi,
            "delta3_phi": lap3_phi, "delta_phi_rr": lap_phi_rr}


def big_phi_from(phi1, phi2, r, N: int, b: float) -> np.ndarray:
    """Φ_R = (8-2b)/(N-b) φ'' + [(8-2b)(N-1) + 2b(N-4)]/(N-b) · φ'/r."""
    c2 = (8.0 - 2.0 * b) / (N - b)
    c1 = ((8.0 - 2.0 * b) * (N - 1) + 2.0 * b * (N - 4)) / (N - b)
    return c2 * phi2 + c1 * phi1 / r


@dataclass(eq=False)
class CutoffProfile:
    grid: RadialGrid
    R: float
    derivs: list = field(repr=False)        # derivs[k] = ∂_r^k φ_R, k = 0..8
    delta_phi: np.ndarray = field(repr=False)
    delta2_phi: np.ndarray = field(repr=False)
    delta3_phi: np.ndarray = field(repr=False)
    delta_phi_rr: np.ndarray = field(repr=False)   # ∂_r² Δφ_R
    big_phi: np.ndarray = field(repr=False)

    @property
    def phi(self):
        return self.derivs[0]

    @property
    def dphi(self):
        return self.derivs[1]

    @property
    def d2phi(self):
        return self.derivs[2]

    def to_csv(self, path) -> None:
        cols = ["r", "phi", "dphi", "d2phi", "delta_phi", "delta2_phi", "delta3_phi", "big_phi"]
        data = [self.grid.nodes, self.phi, self.dphi, self.d2phi, self.delta_phi,
                self.delta2_phi, self.delta3_phi, self.big_phi]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for row in zip(*data):
                w.writerow([repr(float(x)) for x in row])


def make_cutoff(grid: RadialGrid, R: float, chi: ChiProfile | None = None) -> CutoffProfile:
    if not R > 0 or 2.0 * R >= grid.r_max:
        raise CutoffTooLarge(f"need 0 < 2R < r_max = {grid.r_max}, got R = {R}")
    chi = chi or default_chi()
    N, b = grid.params.N, grid.params.b
    r = grid.nodes
    tab = radial_profile_table(chi, R, N, r)
    d = tab["derivs"]
    big = big_phi_from(d[1], d[2], r, N, b)
    return CutoffProfile(grid, float(R), d, tab["delta_phi"], tab["delta2_phi"],
                         tab["delta3_phi"], tab["delta_phi_rr"], big)


def scaling_certificate(R_values, j: int, grid: RadialGrid | None = None,
                        chi: ChiProfile | None = None) -> list:
    """max_r |∂_r^j φ_R| · R^{j-2} for each R.

    With a grid the maximum is over its nodes (what the virial code sees);
    without one it is over a dense sampling of [0, 2R].
    """
    if not 1 <= j <= MAX_DERIV:
        raise ValueError(f"j must be in 1..{MAX_DERIV}")
    chi = chi or default_chi()
    out = []
    for R in map(float, R_values):
        if grid is not None:
            prof = make_cutoff(grid, R, chi)
            vals = prof.derivs[j]
        else:
            r = np.linspace(0.0, 2.0 * R, 200_001)[1:]
            vals = R ** (2 - j) * chi.phi_deriv(r / R, j)
        out.append(float(np.max(np.abs(vals)) * R ** (j - 2)))
    return out
