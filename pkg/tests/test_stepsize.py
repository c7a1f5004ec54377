import numpy as np
import pytest
from hypothesis import given, strategies as st

from tseng_vi.geometry import Box, WholeSpace
from tseng_vi.problems import Affine, Componentwise, VIProblem, builtin
from tseng_vi.stepsize import (BacktrackingError, StepParams, adaptive_next, armijo_search,
                               combined_step, enforce_guard)


def _pair(dw, da):
    z = np.zeros(1)
    return z, np.array([dw]), z, np.array([da])


def test_adaptive_examples():
    w, y, Aw, Ay = _pair(2.0, 1.0)
    assert adaptive_next(0.7, w, y, Aw, Ay, 0.5) == 0.7
    w, y, Aw, Ay = _pair(1.0, 0.0)
    assert adaptive_next(0.3, w, y, Aw, Ay, 0.5) == 0.3
    w, y, Aw, Ay = _pair(1.0, 4.0)
    assert adaptive_next(0.7, w, y, Aw, Ay, 0.5) == 0.125


def test_armijo_hand_oracle():
    # A(x) = 2x on R: condition 4 lam^2 <= lam, so lam <= 0.25
    prob = VIProblem(Affine([[2.0]], [0.0]), WholeSpace(1))
    res = armijo_search(prob, np.array([1.0]), StepParams(mu=0.5, gamma=1.0, ell=0.5))
    assert (res.lam, res.m, res.y.tolist()) == (0.25, 2, [0.5])


def test_armijo_at_solution():
    res = armijo_search(builtin("identity-box"), np.zeros(2), StepParams(gamma=1.3))
    assert (res.lam, res.m, res.y.tolist()) == (1.3, 0, [0.0, 0.0])
    res = armijo_search(builtin("quasi-square-1d"), np.array([-1.0]), StepParams())
    assert (res.lam, res.m, res.y.tolist()) == (1.0, 0, [-1.0])


def test_armijo_failure_carries_last_trial():
    prob = VIProblem(Affine([[2.0]], [0.0]), WholeSpace(1))
    with pytest.raises(BacktrackingError) as info:
        armijo_search(prob, np.array([1.0]), StepParams(m_max=1))
    lam, y, Ay = info.value.last
    assert lam == 0.5 and y.tolist() == [0.0]


def test_armijo_reuses_aw():
    calls = []

    class Spy:
        dim = 1
        cset = WholeSpace(1)

        def operator(self, x):
            calls.append(x)
            return 2 * x

        def project(self, v):
            return v

    armijo_search(Spy(), np.array([1.0]), StepParams(), Aw=np.array([2.0]))
    assert len(calls) == 3  # one per trial m = 0, 1, 2


def test_combined_examples():
    assert combined_step(0.7, 0.25) == 0.25
    assert combined_step(0.1, 0.1) == 0.1
    assert combined_step(0.05, 1.0) == 0.05


def test_step_params_validated():
    for bad in ({"mu": 1.0}, {"ell": 0.0}, {"gamma": -1.0}, {"lambda0": 0.0}, {"m_max": 0}):
        with pytest.raises(ValueError):
            StepParams(**bad)


def test_guard_shrinks_stale_step():
    prob = VIProblem(Affine([[2.0]], [0.0]), WholeSpace(1))
    w = np.array([1.0])
    lam, y, Ay, shrinks = enforce_guard(prob, w, prob.operator(w), 1.0, StepParams())
    assert (lam, shrinks) == (0.25, 2)
    assert lam * abs(Ay[0] - 2.0) <= 0.5 * abs(y[0] - 1.0)


@given(st.integers(0, 2**32 - 1))
def test_adaptive_chain_nonincreasing(seed):
    rng = np.random.default_rng(seed)
    lam = 1.0
    for _ in range(30):
        w, y, Aw, Ay = rng.normal(size=(4, 3))
        new = adaptive_next(lam, w, y, Aw, Ay, 0.5)
        assert new <= lam + 1e-15
        assert new > 0
        lam = new


def armijo_fails(prob, w, lam, mu):
    """Independent re-check of the Armijo inequality at step ``lam``."""
    Aw = prob.operator(w)
    y = prob.project(w - lam * Aw)
    return lam * np.linalg.norm(Aw - prob.operator(y)) > mu * np.linalg.norm(w - y)


@given(st.sampled_from(["identity-box", "rotation-ball", "quasi-square-1d",
                        "affine-hphard-8", "neg-interval-1d"]),
       st.integers(0, 2**32 - 1), st.sampled_from([0.3, 0.5, 0.9]))
def test_armijo_minimal(name, seed, ell):
    prob = builtin(name)
    rng = np.random.default_rng(seed)
    w = rng.uniform(-1.5, 1.5, prob.dim)
    params = StepParams(mu=0.5, gamma=2.0, ell=ell, m_max=500)
    res = armijo_search(prob, w, params)
    assert not armijo_fails(prob, w, res.lam, params.mu)
    for m in range(res.m):
        assert armijo_fails(prob, w, params.gamma * ell ** m, params.mu)
