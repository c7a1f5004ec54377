"""Benchmark harness: YAML run configuration -> CSV traces, summary, SVG plots.

Configuration schema (every key optional unless marked)::

    problems: [identity-box, data/my_matrix.txt]   # required
    methods: [alg3, egm]                           # required
    params:                 # solver parameters; top level applies to all methods
      alpha: 0.1            # float, default 0.1
      beta: -0.05           # float, default -0.05
      mu: 0.5               # float, default 0.5
      gamma: 1.0            # float, default 1.0
      ell: 0.5              # float, default 0.5
      lambda0: 1.0          # float, default 1.0
      m_max: 60             # int, default 60
      step: null            # float, fixed-step methods; default 0.5 / L
      egm: {step: 0.4}      # per-method override block, same keys
    stopping:
      tol_wy: 1.0e-9        # float, default 1e-9
      tol_res: 1.0e-6       # float, default 1e-6
      max_iter: 100000      # int, default 100000
      max_time: null        # float seconds, default none
    starts: {random: 1}     # or a list; entries are vectors or scalars (broadcast)
    seed: 0                 # int, default 0; seeds random starts
    problem_seed: 42        # int, default 42; seeds random problem families
    output_dir: results     # str, default "results"

The output directory is resolved as ``--out`` > ``$TSENG_VI_OUTPUT_DIR`` >
``output_dir``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import logging
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np
import yaml

from . import geometry, problems, solvers
from ._svg import residual_plot

__all__ = [
    "OUTPUT_DIR_ENV",
    "TRACE_COLUMNS",
    "SUMMARY_COLUMNS",
    "ConfigError",
    "ConfigValidationError",
    "RunConfig",
    "parse_config",
    "load_config",
    "resolve_problem",
    "cell_start",
    "run_benchmark",
]

log = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "TSENG_VI_OUTPUT_DIR"
TRACE_COLUMNS = ("k", "lambda", "rule", "armijo_m", "shrinks", "res", "wy_norm",
                 "step_norm", "elapsed_ns")
SUMMARY_COLUMNS = ("method", "problem", "start_id", "iterations", "final_res", "op_evals",
                   "projections", "wall_ns", "stop_reason")

_PARAM_KEYS = {f.name: f.type for f in fields(solvers.SolverParams)}
_STOP_KEYS = {f.name for f in fields(solvers.StoppingRule)}
_INT_KEYS = {"m_max", "max_iter", "seed", "problem_seed"}
_NULLABLE = {"step", "max_time", "tol_wy", "tol_res"}
_TOP_KEYS = {"problems", "methods", "params", "stopping", "starts", "seed",
             "problem_seed", "output_dir"}


class ConfigError(ValueError):
    """Malformed configuration (unknown key, wrong type, unknown name)."""


class ConfigValidationError(ConfigError):
    """Well-formed configuration whose parameters are invalid; lists all violations."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid parameters:\n  " + "\n  ".join(self.violations))


@dataclass(frozen=True)
class RunConfig:
    problems: tuple
    methods: tuple
    params: dict
    stopping: solvers.StoppingRule
    starts: object  # tuple of start specs, or int (random count)
    seed: int = 0
    problem_seed: int = 42
    output_dir: str = "results"


# ---------------------------------------------------------------------------
# parsing

def _where(node, key=None):
    loc = f"line {node.start_mark.line + 1}"
    return f"{loc}, key {key!r}" if key else loc


def _is_null(node):
    return isinstance(node, yaml.ScalarNode) and node.tag.endswith(":null")


def _scalar(node, key, kind):
    if not isinstance(node, yaml.ScalarNode):
        raise ConfigError(f"{_where(node, key)}: expected a {kind.__name__} scalar")
    if _is_null(node):
        if key in _NULLABLE:
            return None
        raise ConfigError(f"{_where(node, key)}: value may not be null")
    if node.tag.endswith(":bool"):
        raise ConfigError(f"{_where(node, key)}: expected {kind.__name__}, got boolean")
    text = node.value
    try:
        if kind is int:
            val = float(text)
            if not val.is_integer():
                raise ValueError
            return int(val)
        if kind is float:
            return float(text)
    except ValueError:
        raise ConfigError(f"{_where(node, key)}: expected {kind.__name__}, got {text!r}") from None
    return text


def _mapping(node, key):
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError(f"{_where(node, key)}: expected a mapping")
    out = {}
    for k, v in node.value:
        if k.value in out:
            raise ConfigError(f"{_where(k, k.value)}: duplicate key")
        out[k.value] = (k, v)
    return out


def _string_list(node, key):
    if isinstance(node, yaml.ScalarNode) and not _is_null(node):
        return (node.value,)
    if not isinstance(node, yaml.SequenceNode):
        raise ConfigError(f"{_where(node, key)}: expected a list of names")
    return tuple(_scalar(item, key, str) for item in node.value)


def _param_block(mapping, base, where_key):
    updates = {}
    for name, (knode, vnode) in mapping.items():
        if name not in _PARAM_KEYS:
            raise ConfigError(f"{_where(knode, name)}: unknown parameter in {where_key!r}; "
                              f"allowed: {sorted(_PARAM_KEYS)}")
        updates[name] = _scalar(vnode, name, int if name in _INT_KEYS else float)
    return replace(base, **updates)


def _starts(node):
    if isinstance(node, yaml.MappingNode):
        m = _mapping(node, "starts")
        if set(m) != {"random"}:
            raise ConfigError(f"{_where(node, 'starts')}: mapping form must be {{random: N}}")
        count = _scalar(m["random"][1], "random", int)
        if count < 1:
            raise ConfigError(f"{_where(node, 'starts')}: random count must be >= 1")
        return count
    if not isinstance(node, yaml.SequenceNode) or not node.value:
        raise ConfigError(f"{_where(node, 'starts')}: expected a non-empty list or {{random: N}}")
    out = []
    for item in node.value:
        if isinstance(item, yaml.SequenceNode):
            out.append(tuple(_scalar(c, "starts", float) for c in item.value))
        else:
            out.append(_scalar(item, "starts", float))
    return tuple(out)


def parse_config(text, validate=True):
    """Parse configuration text into a :class:`RunConfig` with defaults applied.

    Raises :class:`ConfigError` on malformed input and, when ``validate`` is
    true, :class:`ConfigValidationError` listing every invalid
    (problem, method, parameter) combination.
    """
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from None
    if root is None:
        raise ConfigError("empty configuration")
    top = _mapping(root, "<root>")
    for name, (knode, _) in top.items():
        if name not in _TOP_KEYS:
            raise ConfigError(f"{_where(knode, name)}: unknown key; allowed: {sorted(_TOP_KEYS)}")
    for required in ("problems", "methods"):
        if required not in top:
            raise ConfigError(f"missing required key {required!r}")

    probs = _string_list(top["problems"][1], "problems")
    methods = _string_list(top["methods"][1], "methods")
    if not probs or not methods:
        raise ConfigError("problems and methods must be non-empty")
    for m in methods:
        if m not in solvers.METHODS:
            raise ConfigError(f"{_where(top['methods'][1], 'methods')}: unknown method {m!r}; "
                              f"available: {', '.join(solvers.METHODS)}")

    base = solvers.SolverParams()
    per_method = {}
    if "params" in top:
        pmap = _mapping(top["params"][1], "params")
        globals_ = {k: v for k, v in pmap.items() if k not in solvers.METHODS}
        base = _param_block(globals_, base, "params")
        for name, (knode, vnode) in pmap.items():
            if name in solvers.METHODS:
                per_method[name] = _mapping(vnode, name)
    params = {m: _param_block(per_method.get(m, {}), base, m) for m in methods}
    unused = set(per_method) - set(methods)
    if unused:
        log.warning("params given for methods not in the run: %s", sorted(unused))

    stop_kw = {}
    if "stopping" in top:
        for name, (knode, vnode) in _mapping(top["stopping"][1], "stopping").items():
            if name not in _STOP_KEYS:
                raise ConfigError(f"{_where(knode, name)}: unknown stopping key; "
                                  f"allowed: {sorted(_STOP_KEYS)}")
            stop_kw[name] = _scalar(vnode, name, int if name in _INT_KEYS else float)
    try:
        stopping = solvers.StoppingRule(**stop_kw)
    except ValueError as exc:
        raise ConfigError(f"stopping: {exc}") from None

    starts = _starts(top["starts"][1]) if "starts" in top else 1
    seed = _scalar(top["seed"][1], "seed", int) if "seed" in top else 0
    pseed = _scalar(top["problem_seed"][1], "problem_seed", int) if "problem_seed" in top else 42
    outdir = _scalar(top["output_dir"][1], "output_dir", str) if "output_dir" in top else "results"

    cfg = RunConfig(probs, methods, params, stopping, starts, seed, pseed, outdir)
    resolved = []
    for name in probs:
        try:
            resolved.append(resolve_problem(name, pseed))
        except (problems.CatalogError, problems.ConfigurationError, OSError) as exc:
            raise ConfigError(f"problems: cannot resolve {name!r}: {exc}") from None
    if validate:
        violations = []
        for name, prob in zip(probs, resolved):
            for m in methods:
                violations.extend(f"{name}: {msg}"
                                  for msg in solvers.check_params(m, params[m], prob.lipschitz))
            if not isinstance(starts, int):
                for i, s in enumerate(starts):
                    if isinstance(s, tuple) and len(s) != prob.dim:
                        violations.append(f"{name}: start {i} has dimension {len(s)}, "
                                          f"problem has {prob.dim}")
        if violations:
            raise ConfigValidationError(violations)
    return cfg


def load_config(path):
    return parse_config(Path(path).read_text())


def resolve_problem(name, seed=42):
    """Catalog name, or a path to an affine matrix file."""
    path = Path(name)
    if path.suffix or os.sep in name:
        if not path.is_file():
            raise OSError(f"matrix file {name!r} not found")
        return problems.load_affine(path)
    return problems.builtin(name, seed=seed)


# ---------------------------------------------------------------------------
# execution

def _problem_tag(name):
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", Path(name).stem if Path(name).suffix else name)


def _cell_seed(seed, problem, start_index):
    digest = hashlib.sha256(f"{seed}|{problem}|{start_index}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def cell_start(config, problem_name, problem, start_index):
    """Start vector for a cell; random starts depend only on (seed, problem, index)."""
    if isinstance(config.starts, int):
        rng = np.random.default_rng(_cell_seed(config.seed, problem_name, start_index))
        lo, hi = geometry.bounding_box(problem.cset)
        return geometry.project(problem.cset, rng.uniform(lo, hi))
    spec = config.starts[start_index]
    if isinstance(spec, tuple):
        return np.array(spec, dtype=np.float64)
    return np.full(problem.dim, spec, dtype=np.float64)


def _n_starts(config):
    return config.starts if isinstance(config.starts, int) else len(config.starts)


def _run_cell(job):
    prob_name, pseed, method, params, stopping, start, start_id = job
    problem = resolve_problem(prob_name, pseed)
    try:
        rep = solvers.solve(problem, method, params, stopping, start, keep_history=False)
    except Exception as exc:  # a failing cell must not abort the matrix
        return {"error": f"{type(exc).__name__}: {exc}", "records": (), "start_id": start_id}
    return {"error": None, "records": rep.records, "iterations": rep.iterations,
            "op_evals": rep.operator_evals, "projections": rep.projections,
            "stop_reason": rep.stop_reason, "start_id": start_id,
            "wall_ns": rep.records[-1].elapsed_ns if rep.records else 0,
            "final_res": rep.records[-1].res if rep.records else float("nan")}


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def run_benchmark(config, out_dir=None, jobs=1, timings=False):
    """Execute every (problem, method, start) cell and write outputs.

    Writes ``traces/<problem>__<method>__<start>.csv``, ``summary.csv`` and
    ``plots/<problem>.svg`` under the output directory; with ``timings`` also
    ``timings/*.csv`` holding wall-clock values. Default files contain no
    timing data (zeros in the ``elapsed_ns``/``wall_ns`` columns) so repeated
    runs are byte-identical for any ``jobs``. Returns the written paths.
    """
    out = Path(out_dir or os.environ.get(OUTPUT_DIR_ENV) or config.output_dir)
    resolved = {name: resolve_problem(name, config.problem_seed) for name in config.problems}
    jobs_list, keys = [], []
    for name in config.problems:
        prob = resolved[name]
        for method in config.methods:
            for sid in range(_n_starts(config)):
                start = cell_start(config, name, prob, sid)
                jobs_list.append((name, config.problem_seed, method, config.params[method],
                                  config.stopping, start, sid))
                keys.append((name, method, sid))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, jobs_list))
    else:
        results = [_run_cell(j) for j in jobs_list]

    (out / "traces").mkdir(parents=True, exist_ok=True)
    (out / "plots").mkdir(parents=True, exist_ok=True)
    if timings:
        (out / "timings").mkdir(parents=True, exist_ok=True)
    written = []
    summary_rows, wall_rows = [], []
    series = {name: [] for name in config.problems}
    for (name, method, sid), res in zip(keys, results):
        tag = f"{_problem_tag(name)}__{method}__{sid}"
        rows = [(r.k, r.lambda_k, r.rule, r.armijo_m, r.shrinks, r.res, r.wy_norm,
                 r.step_norm, 0) for r in res["records"]]
        path = out / "traces" / f"{tag}.csv"
        path.write_text(_csv_text(TRACE_COLUMNS, rows))
        written.append(path)
        if res["error"] is not None:
            log.error("cell %s failed: %s", tag, res["error"])
            summary_rows.append((method, name, sid, 0, float("nan"), 0, 0, 0, "error"))
            continue
        summary_rows.append((method, name, sid, res["iterations"], res["final_res"],
                             res["op_evals"], res["projections"], 0, res["stop_reason"]))
        series[name].append((method, [r.k for r in res["records"]],
                             [r.res for r in res["records"]]))
        if timings:
            tpath = out / "timings" / f"{tag}.csv"
            tpath.write_text(_csv_text(("k", "elapsed_ns"),
                                       [(r.k, r.elapsed_ns) for r in res["records"]]))
            written.append(tpath)
            wall_rows.append((method, name, sid, res["wall_ns"]))
    spath = out / "summary.csv"
    spath.write_text(_csv_text(SUMMARY_COLUMNS, summary_rows))
    written.append(spath)
    if timings:
        wpath = out / "timings" / "summary_wall.csv"
        wpath.write_text(_csv_text(("method", "problem", "start_id", "wall_ns"), wall_rows))
        written.append(wpath)
    for name in config.problems:
        ppath = out / "plots" / f"{_problem_tag(name)}.svg"
        ppath.write_text(residual_plot(f"{name}: natural residual", series[name]))
        written.append(ppath)
    return written
