import csv

import numpy as np
import pytest

from tseng_vi import harness
from tseng_vi.harness import (ConfigError, ConfigValidationError, parse_config, run_benchmark)
from tseng_vi.solvers import SolverParams, StoppingRule


def _summary(out):
    with open(out / "summary.csv", newline="") as fh:
        return list(csv.DictReader(fh))


def test_minimal_defaults():
    cfg = parse_config("problems: [identity-box]\nmethods: [alg3]\n")
    assert cfg.params == {"alg3": SolverParams()}
    assert cfg.stopping == StoppingRule()
    assert (cfg.starts, cfg.seed, cfg.problem_seed, cfg.output_dir) == (1, 0, 42, "results")


def test_param_overrides_and_floats():
    cfg = parse_config("""
problems: identity-box
methods: [alg3, egm]
params:
  mu: 0.4
  egm: {step: 0.25}
stopping: {tol_res: 1e-7, max_iter: 50, tol_wy: null}
starts: [0.5, [0.1, -0.2]]
""")
    assert cfg.params["alg3"].mu == 0.4 and cfg.params["alg3"].step is None
    assert cfg.params["egm"].step == 0.25 and cfg.params["egm"].mu == 0.4
    assert cfg.stopping == StoppingRule(tol_wy=None, tol_res=1e-7, max_iter=50)
    assert cfg.starts == (0.5, (0.1, -0.2))


def test_a2a_fail_fast():
    with pytest.raises(ConfigValidationError) as info:
        parse_config("problems: [identity-box, rotation-ball]\nmethods: [alg3, egm]\n"
                     "params: {alpha: 0.2, mu: 0.5, egm: {step: 3.0}}\n")
    msgs = info.value.violations
    assert sum("A2a" in m for m in msgs) == 2  # once per problem
    assert sum("egm" in m for m in msgs) == 2
    assert parse_config("problems: [identity-box]\nmethods: [alg3]\nparams: {alpha: 0.2}\n",
                        validate=False).params["alg3"].alpha == 0.2


@pytest.mark.parametrize("text,match", [
    ("problems: [identity-box]\nmethods: [foo]\n", "alg3"),
    ("problems: [identity-box]\nmethods: [alg3]\ncolour: red\n", "line 3.*colour"),
    ("problems: [identity-box]\nmethods: [alg3]\nparams:\n  alpah: 0.1\n", "line 4.*alpah"),
    ("problems: [identity-box]\nmethods: [alg3]\nparams: {mu: fast}\n", "mu.*float"),
    ("problems: [identity-box]\nmethods: [alg3]\nstopping: {max_iter: 1.5}\n", "max_iter"),
    ("problems: [nope]\nmethods: [alg3]\n", "nope"),
    ("methods: [alg3]\n", "problems"),
    ("problems: [identity-box\n", "YAML"),
    ("", "empty"),
])
def test_parse_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(text)


def test_start_dimension_checked():
    with pytest.raises(ConfigValidationError, match="dimension"):
        parse_config("problems: [identity-box]\nmethods: [alg3]\nstarts: [[1, 2, 3]]\n")


def test_random_starts_shared_across_methods():
    cfg = parse_config("problems: [identity-box]\nmethods: [alg3, egm]\nstarts: {random: 3}\n")
    prob = harness.resolve_problem("identity-box")
    a = [harness.cell_start(cfg, "identity-box", prob, i) for i in range(3)]
    b = [harness.cell_start(cfg, "identity-box", prob, i) for i in range(3)]
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not np.array_equal(a[0], a[1])
    assert all(np.all(np.abs(x) <= 1) for x in a)


def test_file_count(tmp_path):
    cfg = parse_config("problems: [identity-box]\nmethods: [alg3, egm]\nstarts: [0.5]\n")
    written = run_benchmark(cfg, tmp_path)
    assert len(written) == 4
    assert len(list((tmp_path / "traces").glob("*.csv"))) == 2
    assert len(list((tmp_path / "plots").glob("*.svg"))) == 1
    assert (tmp_path / "summary.csv").is_file()
    rows = _summary(tmp_path)
    assert [r["method"] for r in rows] == ["alg3", "egm"]
    assert all(float(r["final_res"]) <= 1e-6 for r in rows)


def test_trace_columns(tmp_path):
    cfg = parse_config("problems: [quasi-square-1d]\nmethods: [alg3]\nstarts: [0.9]\n")
    run_benchmark(cfg, tmp_path)
    lines = (tmp_path / "traces" / "quasi-square-1d__alg3__0.csv").read_text().splitlines()
    assert lines[0] == ",".join(harness.TRACE_COLUMNS)
    assert lines[1].startswith("1,")
    svg = (tmp_path / "plots" / "quasi-square-1d.svg").read_text()
    assert svg.startswith("<svg") and "alg3" in svg


def test_divergent_cell_isolated(tmp_path):
    cfg = parse_config("problems: [square-line-1d, identity-box]\nmethods: [alg3]\n"
                       "starts: [-5.0]\n")
    run_benchmark(cfg, tmp_path)
    rows = {r["problem"]: r for r in _summary(tmp_path)}
    assert rows["square-line-1d"]["stop_reason"] == "divergence"
    assert rows["identity-box"]["stop_reason"] in ("res_tol", "wy_tol")


def test_env_var_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(harness.OUTPUT_DIR_ENV, str(tmp_path / "envout"))
    cfg = parse_config("problems: [identity-box]\nmethods: [egm]\nstarts: [0.3]\n")
    run_benchmark(cfg)
    assert (tmp_path / "envout" / "summary.csv").is_file()
    run_benchmark(cfg, tmp_path / "flag")  # explicit path wins
    assert (tmp_path / "flag" / "summary.csv").is_file()


def test_timings_opt_in(tmp_path):
    cfg = parse_config("problems: [identity-box]\nmethods: [egm]\nstarts: [0.3]\n")
    run_benchmark(cfg, tmp_path, timings=True)
    assert (tmp_path / "timings" / "summary_wall.csv").is_file()
    assert _summary(tmp_path)[0]["wall_ns"] == "0"


def test_matrix_file_problem(tmp_path):
    f = tmp_path / "rot.txt"
    f.write_text("2\n0 1\n-1 0\n0 0\n-1 -1 1 1\n")
    cfg = parse_config(f"problems: [{f}]\nmethods: [alg3]\nstarts: [0.5]\n")
    run_benchmark(cfg, tmp_path / "out")
    row = _summary(tmp_path / "out")[0]
    assert float(row["final_res"]) <= 1e-6


def test_jobs_and_repeat_identical(tmp_path):
    cfg = parse_config("problems: [identity-box, quasi-square-1d]\n"
                       "methods: [alg3, liu-yang]\nstarts: {random: 2}\n")
    run_benchmark(cfg, tmp_path / "a")
    run_benchmark(cfg, tmp_path / "b", jobs=3)
    files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    assert len(files) == 8 + 1 + 2
    for rel in files:
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()
