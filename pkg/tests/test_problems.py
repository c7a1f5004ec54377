import numpy as np
import pytest

from tseng_vi import problems
from tseng_vi.geometry import Box, WholeSpace, residual
from tseng_vi.problems import (Affine, CatalogError, Componentwise, Composite,
                               ConfigurationError, EvaluationError, VIProblem, builtin,
                               classify_sample, evaluate, sample_points)

FIXED = ["identity-box", "rotation-ball", "quasi-square-1d", "square-line-1d",
         "neg-interval-1d", "affine-hphard-8", "identity-box-5"]


def test_evaluate_examples():
    rot = Affine([[0, 1], [-1, 0]], [0, 0])
    assert evaluate(rot, [1, 0]).tolist() == [0.0, -1.0]
    assert evaluate(Componentwise("square"), [-0.5]).tolist() == [0.25]
    assert evaluate(Affine(np.eye(2), [1, 1]), [0, 0]).tolist() == [1.0, 1.0]


def test_mixed_componentwise():
    op = Componentwise(("square", "neg", "one"))
    assert evaluate(op, [2.0, 3.0, 7.0]).tolist() == [4.0, -3.0, 1.0]


def test_composite_registry():
    problems.register_operator("test-double", lambda x: 2 * x)
    assert evaluate(Composite("test-double", 2), [1.0, -1.0]).tolist() == [2.0, -2.0]
    with pytest.raises(ConfigurationError, match="not registered"):
        evaluate(Composite("no-such-op", 1), [0.0])


def test_nonfinite_output_names_operator():
    problems.register_operator("test-blowup", lambda x: x / 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        with pytest.raises(EvaluationError, match="blowup"):
            evaluate(Composite("test-blowup", 1, label="blowup"), [1.0])
    with pytest.raises(EvaluationError):
        evaluate(Componentwise("cube"), [1e200])


def test_unknown_scalar_map():
    with pytest.raises(ConfigurationError):
        Componentwise(("square", "tanh"))


def test_lipschitz_below_spectral_norm_rejected():
    with pytest.raises(ValueError, match="spectral norm"):
        Affine(np.diag([3.0, 1.0]), [0, 0], lipschitz=2.0)
    Affine(np.diag([3.0, 1.0]), [0, 0], lipschitz=3.0)


def test_spectral_norm_estimate(rng):
    M = rng.normal(size=(6, 6))
    assert problems.spectral_norm_estimate(M) == pytest.approx(np.linalg.norm(M, 2), rel=1e-8)


def test_bad_dual_solution_rejected():
    with pytest.raises(ValueError, match="residual"):
        VIProblem(Componentwise("square"), Box([-1], [1]), known_dual_solutions=([0.5],))


def test_builtin_examples():
    qs = builtin("quasi-square-1d")
    assert [q.tolist() for q in qs.known_dual_solutions] == [[-1.0]]
    ib = builtin("identity-box")
    assert [s.tolist() for s in ib.known_solutions] == [[0.0, 0.0]]
    hp = builtin("affine-hphard-8", seed=42)
    assert residual(hp, np.zeros(8)) == 0.0


def test_unknown_builtin_lists_catalog():
    with pytest.raises(CatalogError) as info:
        builtin("nope")
    assert "quasi-square-1d" in str(info.value)


def test_hphard_structure():
    M = problems.hphard_matrix(8, seed=42)
    sym = 0.5 * (M + M.T)
    assert np.linalg.eigvalsh(sym).min() >= 1.0 - 1e-9  # N^T N + D with D >= 1
    np.testing.assert_array_equal(M, problems.hphard_matrix(8, seed=42))
    assert not np.array_equal(M, problems.hphard_matrix(8, seed=43))


@pytest.mark.parametrize("name", FIXED)
def test_known_duals_satisfy_dual_inequality(name):
    prob = builtin(name)
    pts = sample_points(prob.cset, 1000, np.random.default_rng(7))
    vals = np.array([prob.operator(z) for z in pts])
    for q in prob.known_dual_solutions:
        assert np.min(np.sum(vals * (pts - q), axis=1)) >= -1e-10


@pytest.mark.parametrize("name", FIXED)
def test_known_solutions_have_zero_residual(name):
    prob = builtin(name)
    for s in prob.known_solutions:
        assert residual(prob, s) <= 1e-12


def test_quasi_square_extra_zeros_are_finite():
    prob = builtin("quasi-square-1d")
    grid = np.linspace(-1, 1, 2001)
    zeros = [v for v in grid if prob.operator([v])[0] == 0.0]
    duals = {tuple(q) for q in prob.known_dual_solutions}
    assert [z for z in zeros if (z,) not in duals] == [0.0]


def test_classify_examples():
    rot = builtin("rotation-ball")
    assert classify_sample(rot.op, rot.cset, 1000, 0).not_refuted("monotone")
    sq = classify_sample(Componentwise("square"), Box([-1], [1]), 1000, 0)
    assert sq.not_refuted("quasimonotone") and not sq.not_refuted("monotone")
    neg = classify_sample(Componentwise("neg"), Box([-1], [1]), 1000, 0)
    assert not neg.not_refuted("quasimonotone")


def test_classify_hand_pair_square():
    # x=-1, y=0 gives <Ax - Ay, x - y> = (1)(-1) < 0
    op = Componentwise("square")
    x, y = np.array([-1.0]), np.array([0.0])
    assert np.dot(evaluate(op, x) - evaluate(op, y), x - y) == -1.0


def test_classify_deterministic():
    op = Componentwise("square")
    a = classify_sample(op, Box([-1], [1]), 300, seed=5)
    assert a == classify_sample(op, Box([-1], [1]), 300, seed=5)


def test_sample_points_inside(rng):
    for name in FIXED:
        cset = builtin(name).cset
        pts = sample_points(cset, 200, rng)
        assert pts.shape == (200, cset.dim)
        if not isinstance(cset, WholeSpace):
            assert all(np.allclose(p, cset_proj(cset, p)) for p in pts)


def cset_proj(cset, p):
    from tseng_vi.geometry import project
    return project(cset, p)


def test_load_affine(tmp_path):
    f = tmp_path / "m.txt"
    f.write_text("# 2x2 rotation plus shift\n2\n0 1\n-1 0\n0.5 0\n")
    prob = problems.load_affine(f)
    assert isinstance(prob.cset, WholeSpace)
    assert prob.operator([1.0, 0.0]).tolist() == [0.5, -1.0]
    assert prob.lipschitz == pytest.approx(1.0)
    g = tmp_path / "b.txt"
    g.write_text("1\n2\n0\n-1 1\n")
    assert isinstance(problems.load_affine(g).cset, Box)


def test_load_affine_wrong_count(tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("2\n1 2 3\n")
    with pytest.raises(ConfigurationError, match="expected"):
        problems.load_affine(f)
