"""Self-adaptive and Armijo-type step sizes, and how they are combined."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._backend import kernels

__all__ = [
    "StepParams",
    "BacktrackingError",
    "ArmijoResult",
    "adaptive_next",
    "armijo_search",
    "combined_step",
    "enforce_guard",
]


@dataclass(frozen=True)
class StepParams:
    mu: float = 0.5
    gamma: float = 1.0
    ell: float = 0.5
    lambda0: float = 1.0
    m_max: int = 60

    def __post_init__(self):
        if not 0 < self.mu < 1:
            raise ValueError(f"mu must lie in (0, 1), got {self.mu}")
        if not 0 < self.ell < 1:
            raise ValueError(f"ell must lie in (0, 1), got {self.ell}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.lambda0 > 0:
            raise ValueError(f"lambda0 must be positive, got {self.lambda0}")
        if self.m_max < 1:
            raise ValueError(f"m_max must be a positive integer, got {self.m_max}")


class BacktrackingError(RuntimeError):
    """Backtracking exhausted ``m_max``; ``last`` is the final trial ``(lam, y, Ay)``."""

    def __init__(self, message, last):
        super().__init__(message)
        self.last = last


class ArmijoResult(NamedTuple):
    lam: float
    m: int
    y: np.ndarray
    Ay: np.ndarray


def adaptive_next(lambda_prev, w, y, Aw, Ay, mu):
    """``min(mu ||w - y|| / ||Aw - Ay||, lambda_prev)``, or ``lambda_prev`` if ``Aw == Ay``."""
    den = kernels.dist(Aw, Ay)
    if den > 0.0:
        return min(mu * kernels.dist(w, y) / den, lambda_prev)
    return lambda_prev


def _compatible(lam, w, y, Aw, Ay, mu):
    return lam * kernels.dist(Aw, Ay) <= mu * kernels.dist(w, y)


def armijo_search(problem, w, params, Aw=None):
    """Smallest ``m >= 0`` with ``lam = gamma * ell**m`` satisfying
    ``lam ||Aw - Ay|| <= mu ||w - y||`` where ``y = P_C(w - lam Aw)``.

    The accepted trial point and its operator value are returned so callers
    never recompute them.
    """
    if Aw is None:
        Aw = problem.operator(w)
    lam = params.gamma
    for m in range(params.m_max + 1):
        y = problem.project(w - lam * Aw)
        Ay = problem.operator(y)
        if _compatible(lam, w, y, Aw, Ay, params.mu):
            return ArmijoResult(lam, m, y, Ay)
        if m < params.m_max:
            lam *= params.ell
    raise BacktrackingError(
        f"Armijo backtracking failed after m_max={params.m_max} reductions "
        f"(last step {lam:.3e}); operator may be discontinuous or badly scaled",
        (lam, y, Ay))


def combined_step(lambda1, lambda2):
    return min(lambda1, lambda2)


def enforce_guard(problem, w, Aw, lam, params, y=None, Ay=None):
    """Shrink ``lam`` by ``ell`` until ``lam ||Aw - Ay|| <= mu ||w - y||``.

    Returns ``(lam, y, Ay, shrinks)``. Terminates for continuous operators;
    raises :class:`BacktrackingError` after ``m_max`` shrinks.
    """
    if y is None:
        y = problem.project(w - lam * Aw)
        Ay = problem.operator(y)
    shrinks = 0
    while not _compatible(lam, w, y, Aw, Ay, params.mu):
        if shrinks == params.m_max:
            raise BacktrackingError(
                f"step guard failed after {shrinks} shrinks (step {lam:.3e})", (lam, y, Ay))
        lam *= params.ell
        shrinks += 1
        y = problem.project(w - lam * Aw)
        Ay = problem.operator(y)
    return lam, y, Ay, shrinks
