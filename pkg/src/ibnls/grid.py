"""Uniform radial grid in dimension N.

Nodes sit at r_i = i*h (i = 1..n, h = r_max/n); the origin is not a node.
Each node owns the cell [f_{i-1}, f_i] with faces at the midpoints between
nodes, f_0 = 0 and f_n = r_max, so the weights are exact cell integrals of
ω_{N-1} r^{N-1} and sum to the ball volume.

The Laplacian is the finite-volume flux form

    (Δf)_i = [A_i (f_{i+1} - f_i) - A_{i-1} (f_i - f_{i-1})] / (h V_i),

A_i = f_i^{N-1}, V_i the cell volume. No flux crosses r = 0 (even extension,
f_r(0) = 0) and a zero ghost value sits one spacing beyond r_max. The
operator is symmetric in the weighted inner product, which is what makes the
linear propagator unitary and the discrete Pohozaev/IBP identities exact.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from .errors import GridMismatch, IndefiniteOperator, InvalidGridSpec, LengthMismatch
from .model import ModelParams


def sphere_area(N: int) -> float:
    """ω_{N-1} = 2 π^{N/2} / Γ(N/2), the area of the unit sphere in R^N."""
    return float(2.0 * np.exp(0.5 * N * np.log(np.pi) - gammaln(0.5 * N)))


@dataclass(frozen=True, eq=False)
class RadialGrid:
    params: ModelParams
    r_max: float
    n: int
    nodes: np.ndarray = field(repr=False)
    faces: np.ndarray = field(repr=False)
    h: float
    omega: float
    weights: np.ndarray = field(repr=False)
    singular_weights: np.ndarray = field(repr=False)
    _cond: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return self.params.N

    @cached_property
    def r_minus_b(self) -> np.ndarray:
        """Cell-averaged r^{-b}: singular_weights / weights."""
        return self.singular_weights / self.weights

    @cached_property
    def _sym(self):
        # S = V^{-1/2} K V^{-1/2}, tridiagonal
        vol = self.weights / self.omega
        s = 1.0 / np.sqrt(vol)
        c = self._cond
        diag = np.zeros(self.n)
        diag[:-1] -= c[:-1]
        diag[1:] -= c[:-1]
        diag[-1] -= c[-1]
        return diag * s * s, c[:-1] * s[:-1] * s[1:], s

    @cached_property
    def lap_eigen(self):
        """(eigenvalues, eigenvectors, s) of the symmetrized Laplacian.

        Δ = diag(s) Q diag(lam) Q^T diag(1/s) with s = V^{-1/2}.
        """
        d, e, s = self._sym
        lam, Q = eigh_tridiagonal(d, e)
        if not np.all(lam < 0):
            raise IndefiniteOperator("discrete Laplacian is not negative definite")
        return lam, np.ascontiguousarray(Q), s

    def laplacian(self, f: np.ndarray) -> np.ndarray:
        f = self._check(f)
        c = self._cond
        vol = self.weights / self.omega
        flux = np.empty(self.n + 1, dtype=np.result_type(f, float))
        flux[0] = 0.0
        flux[1:-1] = c[:-1] * (f[1:] - f[:-1])
        flux[-1] = -c[-1] * f[-1]
        return (flux[1:] - flux[:-1]) / vol

    def bilaplacian(self, f: np.ndarray) -> np.ndarray:
        return self.laplacian(self.laplacian(f))

    def integrate(self, samples) -> float:
        samples = self._check(samples)
        return float(np.real(np.sum(self.weights * samples)))

    def integrate_singular(self, samples) -> float:
        """∫ |x|^{-b} g(|x|) dx with exact cell integrals of r^{N-1-b}."""
        samples = self._check(samples)
        return float(np.real(np.sum(self.singular_weights * samples)))

    def inner(self, f, g) -> complex:
        """Weighted inner product ∫ f conj(g) dx."""
        return complex(np.sum(self.weights * self._check(f) * np.conj(self._check(g))))

    def norm_sq(self, f) -> float:
        return float(np.sum(self.weights * np.abs(self._check(f)) ** 2))

    def grad_sq(self, f) -> float:
        """||∇f||² from face differences, equal to -Re<Δf, f> exactly."""
        f = self._check(f)
        c = self._cond
        d = np.empty(self.n, dtype=f.dtype)
        d[:-1] = f[1:] - f[:-1]
        d[-1] = -f[-1]
        return float(self.omega * np.sum(c * np.abs(d) ** 2))

    def d_r(self, f) -> np.ndarray:
        """Fourth-order centred ∂_r at the nodes."""
        g = self._padded(f)
        return (-g[4:] + 8.0 * g[3:-1] - 8.0 * g[1:-3] + g[:-4]) / (12.0 * self.h)

    def d_rr(self, f) -> np.ndarray:
        """Fourth-order centred ∂_r² at the nodes."""
        g = self._padded(f)
        return (-g[4:] + 16.0 * g[3:-1] - 30.0 * g[2:-2] + 16.0 * g[1:-3] - g[:-4]) \
            / (12.0 * self.h ** 2)

    def _padded(self, f):
        # ghosts: r = -h (even), r = 0 (even quartic fit), two zeros past r_max
        f = self._check(f)
        g = np.zeros(self.n + 4, dtype=f.dtype)
        g[2:-2] = f
        g[1] = 1.5 * f[0] - 0.6 * f[1] + 0.1 * f[2]
        g[0] = f[0]
        return g

    def _check(self, f) -> np.ndarray:
        if isinstance(f, RadialField):
            if not self.same_as(f.grid):
                raise GridMismatch("field lives on a different grid")
            f = f.values
        f = np.asarray(f)
        if f.shape != (self.n,):
            raise LengthMismatch(f"expected {self.n} samples, got shape {f.shape}")
        return f

    def same_as(self, other: "RadialGrid") -> bool:
        return other is self or (
            other.params == self.params and other.r_max == self.r_max and other.n == self.n)

    def field(self, values) -> "RadialField":
        return RadialField(self, np.asarray(values, dtype=complex))

    def sample(self, func, dtype=complex) -> "RadialField":
        return RadialField(self, np.asarray(func(self.nodes), dtype=dtype))


@dataclass(eq=False)
class RadialField:
    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != (self.grid.n,):
            raise LengthMismatch(
                f"expected {self.grid.n} samples, got shape {self.values.shape}")

    @property
    def r(self) -> np.ndarray:
        return self.grid.nodes

    def __mul__(self, c):
        return RadialField(self.grid, self.values * c)

    __rmul__ = __mul__

    def conj(self) -> "RadialField":
        return RadialField(self.grid, np.conj(self.values))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    def far_field_ratio(self, fraction: float = 0.95) -> float:
        """max |u| over r >= fraction*r_max, relative to the peak."""
        a = np.abs(self.values)
        peak = a.max()
        if peak == 0:
            return 0.0
        return float(a[self.grid.nodes >= fraction * self.grid.r_max].max() / peak)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "re_u", "im_u"])
            for r, v in zip(self.grid.nodes, np.asarray(self.values, dtype=complex)):
                w.writerow([repr(float(r)), repr(float(v.real)), repr(float(v.imag))])


def read_field_csv(grid: RadialGrid, path) -> RadialField:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[0] != grid.n or not np.allclose(data[:, 0], grid.nodes, rtol=1e-12):
        raise GridMismatch(f"{path}: nodes do not match the grid")
    return RadialField(grid, data[:, 1] + 1j * data[:, 2])


def make_grid(params: ModelParams, r_max: float, n: int) -> RadialGrid:
    if not (np.isfinite(r_max) and r_max > 0):
        raise InvalidGridSpec(f"r_max must be positive, got {r_max}")
    if int(n) != n or n < 16:
        raise InvalidGridSpec(f"need an integer n >= 16, got {n}")
    n = int(n)
    r_max = float(r_max)
    N, b = params.N, params.b
    h = r_max / n
    nodes = h * np.arange(1, n + 1)
    faces = np.empty(n + 1)
    faces[0] = 0.0
    faces[1:-1] = h * (np.arange(1, n) + 0.5)
    faces[-1] = r_max
    omega = sphere_area(N)
    weights = omega * np.diff(faces ** N) / N
    singular = omega * np.diff(faces ** (N - b)) / (N - b)
    cond = faces[1:] ** (N - 1) / h
    return RadialGrid(params, r_max, n, nodes, faces, h, omega, weights, singular, cond)


def _unwrap(grid: RadialGrid, f) -> np.ndarray:
    if isinstance(f, RadialField) and not grid.same_as(f.grid):
        raise GridMismatch("field lives on a different grid")
    return f.values if isinstance(f, RadialField) else np.asarray(f)


def integrate(grid: RadialGrid, samples) -> float:
    return grid.integrate(_unwrap(grid, samples))


def apply_laplacian(grid: RadialGrid, f: RadialField) -> RadialField:
    return RadialField(grid, grid.laplacian(_unwrap(grid, f)))


def apply_bilaplacian(grid: RadialGrid, f: RadialField) -> RadialField:
    return RadialField(grid, grid.bilaplacian(_unwrap(grid, f)))
