"""Inertial-parameter admissibility and Lyapunov-sequence tracking.

The admissible region for ``(alpha, beta, mu)`` is the intersection of three
conditions, labelled ``A2a``, ``A2b`` and ``A2c`` throughout:

* A2a: ``0 <= alpha <= (1 - mu) / (3 + mu)``
* A2b: ``max{2 alpha (1-mu)/(3+mu) - (1-alpha),
  (alpha (1+mu) - (1-mu)(1-alpha)^2 / (1+alpha)) / 2} < beta <= 0``
* A2c: ``2 alpha^2 mu - (1 - 3 alpha) + mu (1 - alpha) - beta (4 alpha + 3 - mu)
  + 2 mu beta^2 < 0``

Under these, along any run of the two-step inertial Tseng method and for any
dual solution ``q``, the sequence

``Gamma'_k = Gamma_k + k1 ||x_{k-1} - x_{k-2}||^2``

is nonincreasing, where ``Gamma_k = ||x_k-q||^2 - alpha ||x_{k-1}-q||^2 -
beta ||x_{k-2}-q||^2 + c (1 + beta - alpha) ||x_k - x_{k-1}||^2`` and
``c = (1-mu)/(1+mu)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import geometry

__all__ = [
    "ParamVerdict",
    "BetaInterval",
    "LyapunovTrace",
    "validate_params",
    "feasible_beta_interval",
    "k_constants",
    "lyapunov_track",
]


@dataclass(frozen=True)
class ParamVerdict:
    feasible: bool
    failed_conditions: frozenset
    values: dict

    def messages(self):
        v = self.values
        out = []
        if "A2a" in self.failed_conditions:
            out.append(f"A2a violated: need 0 <= alpha <= (1-mu)/(3+mu) = "
                       f"{v['A2a_upper']:.6g}, got alpha = {v['alpha']:.6g}")
        if "A2b" in self.failed_conditions:
            out.append(f"A2b violated: need {v['A2b_lower']:.6g} < beta <= 0, "
                       f"got beta = {v['beta']:.6g}")
        if "A2c" in self.failed_conditions:
            out.append(f"A2c violated: quadratic form = {v['A2c_value']:.6g} must be < 0")
        return out

    def __str__(self):
        v = self.values
        lines = [f"alpha={v['alpha']:.10g} beta={v['beta']:.10g} mu={v['mu']:.10g}",
                 f"A2a: 0 <= {v['alpha']:.10g} <= {v['A2a_upper']:.10g}  "
                 f"[{'fail' if 'A2a' in self.failed_conditions else 'ok'}]",
                 f"A2b: {v['A2b_lower']:.10g} < {v['beta']:.10g} <= 0  "
                 f"[{'fail' if 'A2b' in self.failed_conditions else 'ok'}]",
                 f"A2c: {v['A2c_value']:.10g} < 0  "
                 f"[{'fail' if 'A2c' in self.failed_conditions else 'ok'}]",
                 "feasible" if self.feasible else "infeasible"]
        return "\n".join(lines)


def _check_mu(mu):
    if not 0 < mu < 1:
        raise ValueError(f"mu must lie in (0, 1), got {mu}")


def _a2a_upper(mu):
    return (1 - mu) / (3 + mu)


def _a2b_lower(alpha, mu):
    first = 2 * alpha * (1 - mu) / (3 + mu) - (1 - alpha)
    second = 0.5 * (alpha * (1 + mu) - (1 - mu) * (1 - alpha) ** 2 / (1 + alpha))
    return max(first, second)


def _a2c_coeffs(alpha, mu):
    # 2 mu beta^2 - (4 alpha + 3 - mu) beta + c0 < 0
    c0 = 2 * alpha ** 2 * mu - (1 - 3 * alpha) + mu * (1 - alpha)
    return 2 * mu, -(4 * alpha + 3 - mu), c0


def validate_params(alpha, beta, mu):
    _check_mu(mu)
    upper = _a2a_upper(mu)
    lower = _a2b_lower(alpha, mu)
    a, b, c = _a2c_coeffs(alpha, mu)
    quad = a * beta ** 2 + b * beta + c
    failed = set()
    if not 0 <= alpha <= upper:
        failed.add("A2a")
    if not lower < beta <= 0:
        failed.add("A2b")
    if not quad < 0:
        failed.add("A2c")
    values = {"alpha": alpha, "beta": beta, "mu": mu, "A2a_upper": upper,
              "A2b_lower": lower, "A2c_value": quad}
    return ParamVerdict(not failed, frozenset(failed), values)


class BetaInterval(NamedTuple):
    lower: float
    upper: float
    lower_open: bool
    upper_open: bool

    def __contains__(self, beta):
        lo_ok = beta > self.lower if self.lower_open else beta >= self.lower
        hi_ok = beta < self.upper if self.upper_open else beta <= self.upper
        return lo_ok and hi_ok

    @property
    def midpoint(self):
        return 0.5 * (self.lower + self.upper)

    def __str__(self):
        return (f"{'(' if self.lower_open else '['}{self.lower:.12g}, "
                f"{self.upper:.12g}{')' if self.upper_open else ']'}")


def _quadratic_roots(a, b, c):
    """Real roots of ``a t^2 + b t + c`` in increasing order, or None."""
    disc = b * b - 4 * a * c
    if disc <= 0:
        return None
    # cancellation-free form
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    r1, r2 = q / a, (c / q if q != 0 else -q / a)
    return (r1, r2) if r1 <= r2 else (r2, r1)


def feasible_beta_interval(alpha, mu):
    """Interval of ``beta`` satisfying A2b and A2c for fixed ``(alpha, mu)``, or None."""
    _check_mu(mu)
    if not 0 <= alpha <= _a2a_upper(mu):
        raise ValueError(f"A2a violated: alpha={alpha} outside [0, {_a2a_upper(mu):.6g}]")
    lower = _a2b_lower(alpha, mu)
    roots = _quadratic_roots(*_a2c_coeffs(alpha, mu))
    if roots is None:
        return None
    r1, r2 = roots
    lo = max(lower, r1)
    if r2 <= 0:
        hi, hi_open = r2, True
    else:
        hi, hi_open = 0.0, False
    if lo >= hi:
        return None
    return BetaInterval(lo, hi, True, hi_open)


def k_constants(alpha, beta, mu):
    c = (1 - mu) / (1 + mu)
    k1 = -((1 + alpha) * (alpha - beta) - c * (alpha ** 2 - 2 * alpha + beta * alpha + beta + 1))
    k2 = k1 + beta * (alpha - beta) + c * (beta ** 2 + beta + beta * alpha)
    return k1, k2


@dataclass(frozen=True, eq=False)
class LyapunovTrace:
    """``gamma[i]`` and ``gamma_prime[i]`` belong to iterate index ``k = i + 1``."""

    gamma: np.ndarray
    gamma_prime: np.ndarray
    k1: float
    k2: float

    def max_increase(self):
        """Largest ``Gamma'_{k+1} - Gamma'_k`` (nonpositive when descent holds)."""
        if self.gamma_prime.size < 2:
            return 0.0
        return float(np.max(np.diff(self.gamma_prime)))

    def is_nonincreasing(self, rel_slack=1e-10):
        slack = rel_slack * (1 + abs(float(self.gamma_prime[0])))
        return self.max_increase() <= slack


def lyapunov_track(report, q, params, problem):
    """Evaluate ``Gamma_k`` and ``Gamma'_k`` along the iterates of ``report``.

    ``q`` must be a solution (natural residual <= 1e-8); for the descent
    guarantee it must also be a dual solution.
    """
    if report.iterates is None:
        raise ValueError("report has no iterate history (run solve with keep_history=True)")
    q = geometry.as_vector(q, dim=problem.dim, name="q")
    r = geometry.residual(problem, q)
    if r > 1e-8:
        raise ValueError(f"probe point q has residual {r:.3g} > 1e-8")
    alpha, beta, mu = params.alpha, params.beta, params.mu
    k1, k2 = k_constants(alpha, beta, mu)
    c = (1 - mu) / (1 + mu)
    X = report.iterates  # row j holds x_{j-1}
    dq = np.sum((X - q) ** 2, axis=1)
    dx = np.sum(np.diff(X, axis=0) ** 2, axis=1)  # dx[j] = ||x_j - x_{j-1}||^2
    # Gamma_k for k = 1..K+1 uses rows k+1, k, k-1
    gamma = dq[2:] - alpha * dq[1:-1] - beta * dq[:-2] + c * (1 + beta - alpha) * dx[1:]
    gamma_prime = gamma + k1 * dx[:-1]
    return LyapunovTrace(gamma, gamma_prime, k1, k2)
