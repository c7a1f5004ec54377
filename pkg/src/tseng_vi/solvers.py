"""Iteration kernels for the two-step inertial Tseng method and its baselines.

Every method is a *stepper*: a function ``(problem, params, state) ->
(state', StepInfo)`` that advances the iterate window by one. :func:`solve`
drives any registered stepper with uniform stopping, counting and tracing.

Registry names: ``goldstein``, ``egm``, ``segm``, ``tseng-fixed``,
``liu-yang``, ``thong-hieu``, ``alg1-mewomo`` and ``alg3``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple

import numpy as np

from . import geometry
from ._backend import kernels
from .diagnostics import validate_params
from .geometry import as_vector
from .problems import EvaluationError
from .stepsize import (BacktrackingError, StepParams, adaptive_next, armijo_search,
                       combined_step, enforce_guard)

__all__ = [
    "ParameterError",
    "InertialParams",
    "SolverParams",
    "StoppingRule",
    "SolverState",
    "IterationRecord",
    "RunReport",
    "StepInfo",
    "CountingProblem",
    "METHODS",
    "method_names",
    "check_params",
    "initial_state",
    "solve",
    "goldstein_step",
    "egm_step",
    "segm_step",
    "tseng_fixed_step",
    "liu_yang_step",
    "thong_hieu_step",
    "alg1_mewomo_step",
    "two_step_inertial_tseng_step",
]

DIVERGENCE_BOUND = 1e12
STOP_REASONS = ("wy_tol", "res_tol", "max_iter", "time", "backtrack_fail",
                "divergence", "eval_error")


class ParameterError(ValueError):
    """Parameters are invalid for the requested method; lists every violation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class InertialParams:
    alpha: float = 0.0
    beta: float = 0.0


@dataclass(frozen=True)
class SolverParams:
    """Flat parameter bundle shared by every method.

    ``step`` is the constant step of the fixed-step methods; when ``None`` they
    use ``0.5 / L``. Methods ignore the fields they do not use.
    """

    alpha: float = 0.1
    beta: float = -0.05
    mu: float = 0.5
    gamma: float = 1.0
    ell: float = 0.5
    lambda0: float = 1.0
    m_max: int = 60
    step: float | None = None

    @property
    def inertial(self):
        return InertialParams(self.alpha, self.beta)

    @property
    def step_params(self):
        return StepParams(self.mu, self.gamma, self.ell, self.lambda0, self.m_max)


@dataclass(frozen=True)
class StoppingRule:
    """Stop on ``||w_k - y_k|| <= tol_wy``, residual ``<= tol_res``, the
    iteration cap or the time budget. ``None`` disables a tolerance."""

    tol_wy: float | None = 1e-9
    tol_res: float | None = 1e-6
    max_iter: int = 100_000
    max_time: float | None = None  # seconds

    def __post_init__(self):
        for tol in (self.tol_wy, self.tol_res):
            if tol is not None and tol < 0:
                raise ValueError("tolerances must be nonnegative")
        if self.max_iter < 1:
            raise ValueError("max_iter must be a positive integer")


@dataclass(frozen=True)
class SolverState:
    k: int
    x: np.ndarray
    x_prev: np.ndarray
    x_prev2: np.ndarray
    lambda_prev: float
    # adaptive-rule chain, kept apart from the accepted step
    lambda1_prev: float
    w: np.ndarray | None = None
    y: np.ndarray | None = None
    Aw: np.ndarray | None = None
    Ay: np.ndarray | None = None
    stopped: bool = False
    reason: str | None = None


class StepInfo(NamedTuple):
    lam: float
    rule: str
    armijo_m: int
    shrinks: int
    w: np.ndarray
    y: np.ndarray


class IterationRecord(NamedTuple):
    k: int
    lambda_k: float
    rule: str
    armijo_m: int
    shrinks: int
    res: float
    wy_norm: float
    step_norm: float
    elapsed_ns: int


@dataclass(frozen=True, eq=False)
class RunReport:
    method: str
    final_x: np.ndarray
    iterations: int
    records: tuple
    stop_reason: str
    operator_evals: int
    projections: int
    # x_{-1}, x_0, x_1, ..., x_{K+1}; w_k and y_k for k = 1..K
    iterates: np.ndarray | None = field(default=None, repr=False)
    w_hist: np.ndarray | None = field(default=None, repr=False)
    y_hist: np.ndarray | None = field(default=None, repr=False)
    message: str = ""

    def same_outcome(self, other):
        """Bitwise equality of everything except wall-clock timings."""
        def strip(recs):
            return [r[:-1] for r in recs]

        def arr_eq(a, b):
            return (a is None and b is None) or (
                a is not None and b is not None and a.shape == b.shape
                and a.tobytes() == b.tobytes())

        return (self.method == other.method
                and self.iterations == other.iterations
                and self.stop_reason == other.stop_reason
                and self.operator_evals == other.operator_evals
                and self.projections == other.projections
                and self.final_x.tobytes() == other.final_x.tobytes()
                and strip(self.records) == strip(other.records)
                and arr_eq(self.iterates, other.iterates)
                and arr_eq(self.w_hist, other.w_hist)
                and arr_eq(self.y_hist, other.y_hist))


class CountingProblem:
    """Wraps a problem and counts operator evaluations and projections."""

    def __init__(self, problem):
        self.problem = problem
        self.operator_evals = 0
        self.projections = 0

    @property
    def dim(self):
        return self.problem.dim

    @property
    def cset(self):
        return self.problem.cset

    @property
    def lipschitz(self):
        return self.problem.lipschitz

    def operator(self, x):
        self.operator_evals += 1
        return self.problem.operator(x)

    def project(self, v):
        self.projections += 1
        return self.problem.project(v)


# ---------------------------------------------------------------------------
# steppers

def _advance(state, x_next, lam, w, y, Aw, Ay, lambda1=None):
    return replace(state, k=state.k + 1, x=x_next, x_prev=state.x, x_prev2=state.x_prev,
                   lambda_prev=lam,
                   lambda1_prev=state.lambda1_prev if lambda1 is None else lambda1,
                   w=w, y=y, Aw=Aw, Ay=Ay)


def _fixed_step(problem, params):
    if params.step is not None:
        return params.step
    return 0.5 / problem.lipschitz


def goldstein_step(problem, params, state):
    """``x+ = P_C(x - lam A x)``."""
    lam = _fixed_step(problem, params)
    x = state.x
    Ax = problem.operator(x)
    x_next = problem.project(x - lam * Ax)
    return _advance(state, x_next, lam, x, x_next, Ax, None), StepInfo(lam, "fixed", -1, 0, x, x_next)


def egm_step(problem, params, state):
    """Extragradient: ``y = P_C(x - lam Ax)``, ``x+ = P_C(x - lam Ay)``."""
    lam = _fixed_step(problem, params)
    x = state.x
    Ax = problem.operator(x)
    y = problem.project(x - lam * Ax)
    Ay = problem.operator(y)
    x_next = problem.project(x - lam * Ay)
    return _advance(state, x_next, lam, x, y, Ax, Ay), StepInfo(lam, "fixed", -1, 0, x, y)


def segm_step(problem, params, state):
    """Subgradient extragradient: second projection onto the halfspace
    ``T = {v : <x - lam Ax - y, v - y> <= 0}`` instead of ``C``.
    """
    lam = _fixed_step(problem, params)
    x = state.x
    Ax = problem.operator(x)
    v = x - lam * Ax
    y = problem.project(v)
    Ay = problem.operator(y)
    normal = v - y
    target = x - lam * Ay
    if np.any(normal):
        x_next = kernels.project_halfspace(target, normal, float(np.dot(normal, y)))
    else:
        # v already in C: T is the whole space
        x_next = target
    return _advance(state, x_next, lam, x, y, Ax, Ay), StepInfo(lam, "fixed", -1, 0, x, y)


def tseng_fixed_step(problem, params, state):
    """Forward-backward-forward: ``x+ = y - lam (Ay - Ax)``."""
    lam = _fixed_step(problem, params)
    x = state.x
    Ax = problem.operator(x)
    y = problem.project(x - lam * Ax)
    Ay = problem.operator(y)
    x_next = y - lam * (Ay - Ax)
    return _advance(state, x_next, lam, x, y, Ax, Ay), StepInfo(lam, "fixed", -1, 0, x, y)


def liu_yang_step(problem, params, state):
    """Tseng step with the self-adaptive update applied after the step."""
    lam = state.lambda_prev
    x = state.x
    Ax = problem.operator(x)
    y = problem.project(x - lam * Ax)
    Ay = problem.operator(y)
    x_next = y - lam * (Ay - Ax)
    nxt = adaptive_next(lam, x, y, Ax, Ay, params.mu)
    new = _advance(state, x_next, nxt, x, y, Ax, Ay, lambda1=nxt)
    return new, StepInfo(lam, "adaptive", -1, 0, x, y)


def _armijo_tseng(problem, params, state, w):
    Aw = problem.operator(w)
    arm = armijo_search(problem, w, params.step_params, Aw)
    x_next = arm.y - arm.lam * (arm.Ay - Aw)
    new = _advance(state, x_next, arm.lam, w, arm.y, Aw, arm.Ay)
    return new, StepInfo(arm.lam, "armijo", arm.m, 0, w, arm.y)


def thong_hieu_step(problem, params, state):
    """One-step inertial Tseng with Armijo steps: ``w = x + alpha (x - x_prev)``."""
    w = state.x + params.alpha * (state.x - state.x_prev)
    return _armijo_tseng(problem, params, state, w)


def _two_step_extrapolate(params, state):
    return (state.x + params.alpha * (state.x - state.x_prev)
            + params.beta * (state.x_prev - state.x_prev2))


def alg1_mewomo_step(problem, params, state):
    """Two-step inertial Tseng with Armijo-only steps."""
    return _armijo_tseng(problem, params, state, _two_step_extrapolate(params, state))


def two_step_inertial_tseng_step(problem, params, state):
    """Two-step inertial Tseng step with ``lam = min(adaptive, Armijo)``.

    The adaptive candidate is built from the previous iteration's accepted
    ``(w, y, Aw, Ay)``; on the first step it is ``lambda0``. If the adaptive
    candidate wins, the compatibility inequality
    ``lam ||Aw - Ay|| <= mu ||w - y||`` is re-checked at the new ``y`` and
    ``lam`` shrunk by ``ell`` until it holds (counted in ``shrinks``).
    """
    sp = params.step_params
    w = _two_step_extrapolate(params, state)
    Aw = problem.operator(w)
    if state.w is None:
        lam1 = state.lambda1_prev
    else:
        lam1 = adaptive_next(state.lambda1_prev, state.w, state.y, state.Aw, state.Ay, sp.mu)
    arm = armijo_search(problem, w, sp, Aw)
    lam = combined_step(lam1, arm.lam)
    rule = "adaptive" if lam1 <= arm.lam else "armijo"
    if lam == arm.lam:
        y, Ay, shrinks = arm.y, arm.Ay, 0
    else:
        lam, y, Ay, shrinks = enforce_guard(problem, w, Aw, lam, sp)
    x_next = y - lam * (Ay - Aw)
    new = _advance(state, x_next, lam, w, y, Aw, Ay, lambda1=lam1)
    return new, StepInfo(lam, rule, arm.m, shrinks, w, y)


class Method(NamedTuple):
    stepper: Callable
    fixed_step: bool
    inertia: str  # "none", "one-step" or "two-step"


METHODS = {
    "goldstein": Method(goldstein_step, True, "none"),
    "egm": Method(egm_step, True, "none"),
    "segm": Method(segm_step, True, "none"),
    "tseng-fixed": Method(tseng_fixed_step, True, "none"),
    "liu-yang": Method(liu_yang_step, False, "none"),
    "thong-hieu": Method(thong_hieu_step, False, "one-step"),
    "alg1-mewomo": Method(alg1_mewomo_step, False, "two-step"),
    "alg3": Method(two_step_inertial_tseng_step, False, "two-step"),
}


def method_names():
    return list(METHODS)


def check_params(method, params, lipschitz):
    """Return every parameter violation for running ``method`` (empty if fine)."""
    if method not in METHODS:
        return [f"unknown method {method!r}; available: {', '.join(METHODS)}"]
    spec = METHODS[method]
    errors = []
    if spec.fixed_step:
        if lipschitz is None:
            errors.append(f"{method}: fixed-step method needs a declared Lipschitz constant")
        else:
            lam = params.step if params.step is not None else 0.5 / lipschitz
            if not 0 < lam < 1.0 / lipschitz:
                errors.append(
                    f"{method}: step {lam} outside (0, 1/L) = (0, {1.0 / lipschitz:.6g})")
        return errors
    try:
        params.step_params
    except ValueError as exc:
        errors.append(f"{method}: {exc}")
        return errors
    if method == "alg3":
        verdict = validate_params(params.alpha, params.beta, params.mu)
        errors.extend(f"alg3: {msg}" for msg in verdict.messages())
    elif spec.inertia != "none":
        if params.alpha < 0:
            errors.append(f"{method}: alpha must be >= 0, got {params.alpha}")
        if spec.inertia == "two-step" and params.beta > 0:
            errors.append(f"{method}: beta must be <= 0, got {params.beta}")
    return errors


def initial_state(problem, start, params):
    """``x_{-1} = x_0 = x_1 = P_C(start)``; the first adaptive step is ``lambda0``."""
    x1 = geometry.project(problem.cset, as_vector(start, dim=problem.dim, name="start"))
    return SolverState(k=1, x=x1, x_prev=x1.copy(), x_prev2=x1.copy(),
                       lambda_prev=params.lambda0, lambda1_prev=params.lambda0)


def _diverged(x):
    return not np.all(np.isfinite(x)) or float(np.max(np.abs(x))) > DIVERGENCE_BOUND


def solve(problem, method, params=None, stopping=None, start=None, keep_history=True):
    """Run ``method`` on ``problem`` until a stopping rule fires.

    The residual in the records (natural map with ``psi = 1``, at ``x_{k+1}``)
    is a diagnostic and is not included in ``operator_evals``/``projections``.
    Backtracking failures, divergence (``|x_i| > 1e12``) and non-finite
    operator values end the run with the matching ``stop_reason`` instead of
    raising. Invalid parameters raise :class:`ParameterError` up front.
    """
    params = params or SolverParams()
    stopping = stopping or StoppingRule()
    errors = check_params(method, params, problem.lipschitz)
    if errors:
        raise ParameterError(errors)
    stepper = METHODS[method].stepper
    if start is None:
        start = np.zeros(problem.dim)
    counted = CountingProblem(problem)
    state = initial_state(problem, start, params)
    iterates = [state.x_prev2, state.x_prev, state.x]
    w_hist, y_hist, records = [], [], []
    reason, message = "max_iter", ""
    t0 = time.perf_counter_ns()
    while True:
        try:
            new, info = stepper(counted, params, state)
        except BacktrackingError as exc:
            reason, message = "backtrack_fail", str(exc)
            break
        except EvaluationError as exc:
            reason, message = "eval_error", str(exc)
            break
        x_next = new.x
        if _diverged(x_next):
            state = new
            reason = "divergence"
            records.append(IterationRecord(
                new.k - 1, info.lam, info.rule, info.armijo_m, info.shrinks, float("inf"),
                kernels.dist(info.w, info.y), float("inf"), time.perf_counter_ns() - t0))
            break
        wy = kernels.dist(info.w, info.y)
        try:
            res = geometry.residual(problem, x_next)
        except EvaluationError:
            res = float("inf")
        records.append(IterationRecord(
            state.k, info.lam, info.rule, info.armijo_m, info.shrinks, res, wy,
            kernels.dist(x_next, state.x), time.perf_counter_ns() - t0))
        if keep_history:
            iterates.append(x_next)
            w_hist.append(info.w)
            y_hist.append(info.y)
        state = new
        if stopping.tol_wy is not None and wy <= stopping.tol_wy:
            reason = "wy_tol"
            break
        if stopping.tol_res is not None and res <= stopping.tol_res:
            reason = "res_tol"
            break
        if len(records) >= stopping.max_iter:
            reason = "max_iter"
            break
        if stopping.max_time is not None and (time.perf_counter_ns() - t0) > stopping.max_time * 1e9:
            reason = "time"
            break
    state = replace(state, stopped=True, reason=reason)
    dim = problem.dim
    return RunReport(
        method=method,
        final_x=state.x,
        iterations=len(records),
        records=tuple(records),
        stop_reason=reason,
        operator_evals=counted.operator_evals,
        projections=counted.projections,
        iterates=np.array(iterates) if keep_history else None,
        w_hist=np.array(w_hist).reshape(-1, dim) if keep_history else None,
        y_hist=np.array(y_hist).reshape(-1, dim) if keep_history else None,
        message=message,
    )
