"""Radial numerical lab for i u_t + Δ²u = |x|^{-b}|u|^{(8-2b)/(N-4)}u, N >= 5."""
from .cutoff import CutoffProfile, make_cutoff, scaling_certificate
from .errors import IBNLSError, NumericalError, ValidationError
from .evolution import SimConfig, SimState, TimeSeries, detect_blowup, evolve, step
from .experiments import Classification, Facts, classify, classify_facts, ode_blowup, sweep
from .functionals import FunctionalReport, inequality_report, report
from .grid import (RadialField, RadialGrid, apply_bilaplacian, apply_laplacian, integrate,
                   make_grid)
from .ground_state import GroundStateResult, coercivity_gap, solve_ground_state, weinstein
from .model import ModelParams, make_params, threshold_16_over_N
from .virial import VirialReport, morawetz, rate_bound, rate_exact, rate_localized, tail_error

__version__ = "0.1.0"
