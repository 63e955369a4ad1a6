"""Equation parameters for the energy-critical inhomogeneous biharmonic NLS

    i u_t + Δ²u = |x|^{-b} |u|^{alpha} u,   x in R^N,

with alpha = (8 - 2b)/(N - 4) and total power p = alpha + 2 = 2(N - b)/(N - 4).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DimensionTooSmall, InhomogeneityOutOfRange


@dataclass(frozen=True)
class ModelParams:
    N: int
    b: float
    p: float = field(init=False)
    alpha: float = field(init=False)
    q: float = field(init=False)

    def __post_init__(self):
        N, b = self.N, self.b
        alpha = (8.0 - 2.0 * b) / (N - 4)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "p", alpha + 2.0)
        object.__setattr__(self, "q", alpha + 1.0)

    @property
    def energy_coeff(self) -> float:
        """Coefficient (N-4)/(2(N-b)) of the potential term in the energy."""
        return (self.N - 4) / (2.0 * (self.N - self.b))

    @property
    def pohozaev_coeff(self) -> float:
        """(4-b)/(2(N-b)): E(W) = pohozaev_coeff * ||ΔW||²."""
        return (4.0 - self.b) / (2.0 * (self.N - self.b))

    @property
    def scaling_exponent(self) -> float:
        """(N-4)/2, the amplitude exponent of the critical rescaling."""
        return (self.N - 4) / 2.0

    def as_dict(self) -> dict:
        return {"N": self.N, "b": self.b, "p": self.p, "alpha": self.alpha, "q": self.q}


def b_upper(N: int) -> float:
    return min(4.0, N / 2.0)


def make_params(N, b) -> ModelParams:
    if int(N) != N:
        raise DimensionTooSmall(f"dimension must be an integer, got {N!r}")
    N = int(N)
    if N < 5:
        raise DimensionTooSmall(f"need N >= 5, got N={N}")
    b = float(b)
    if not (0.0 < b < b_upper(N)):
        raise InhomogeneityOutOfRange(
            f"need 0 < b < min(4, N/2) = {b_upper(N)}, got b={b}")
    return ModelParams(N, b)


def threshold_16_over_N(params: ModelParams) -> dict:
    """Return ``{"threshold": 16/N, "reachable": bool}``.

    ``reachable`` says whether [16/N, min(4, N/2)) is nonempty, i.e. whether
    any admissible b satisfies the b >= 16/N hypothesis. Decided in exact
    rational arithmetic so N where 16/N touches the upper bound is not fuzzy.
    """
    N = params.N
    thr = Fraction(16, N)
    upper = min(Fraction(4), Fraction(N, 2))
    return {"threshold": float(thr), "reachable": thr < upper}
