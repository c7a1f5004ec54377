"""Two-step inertial Tseng extragradient solvers for variational inequalities.

Find ``x* in C`` with ``<A(x*), x - x*> >= 0`` for all ``x in C``.
"""

from ._backend import BACKEND
from .diagnostics import (feasible_beta_interval, k_constants, lyapunov_track,
                          validate_params)
from .geometry import (Ball, Box, Halfspace, HalfspaceIntersection, Simplex, WholeSpace,
                       project, residual)
from .problems import Affine, Componentwise, Composite, VIProblem, builtin, classify_sample
from .solvers import SolverParams, StoppingRule, solve

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Affine", "Componentwise", "Composite", "VIProblem", "builtin", "classify_sample",
    "Ball", "Box", "Halfspace", "HalfspaceIntersection", "Simplex", "WholeSpace",
    "project", "residual",
    "SolverParams", "StoppingRule", "solve",
    "feasible_beta_interval", "k_constants", "lyapunov_track", "validate_params",
]
