"""Command line entry point (``tseng-vi`` / ``python -m tseng_vi``).

Exit codes: 0 success or feasible, 1 infeasible parameters or validation
failure, 2 usage error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys

from . import diagnostics, harness, oracle, problems, solvers

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


def _parser():
    p = argparse.ArgumentParser(prog="tseng-vi", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a benchmark configuration")
    run.add_argument("--config", required=True, help="YAML run configuration")
    run.add_argument("--out", help="output directory (overrides config and environment)")
    run.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    run.add_argument("--timings", action="store_true",
                     help="also write wall-clock timings to timings/*.csv")

    val = sub.add_parser("validate", help="check (alpha, beta, mu) admissibility")
    val.add_argument("--alpha", type=float, required=True)
    val.add_argument("--beta", type=float, required=True)
    val.add_argument("--mu", type=float, required=True)

    br = sub.add_parser("beta-range", help="admissible beta interval for (alpha, mu)")
    br.add_argument("--alpha", type=float, required=True)
    br.add_argument("--mu", type=float, required=True)

    orc = sub.add_parser("oracle", help="brute-force solution clusters as CSV")
    orc.add_argument("--problem", required=True)
    orc.add_argument("--step", type=float, default=None)
    orc.add_argument("--tol", type=float, default=1e-9)

    sub.add_parser("list", help="list catalog problems and solver methods")
    return p


def _cmd_run(args):
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = harness.load_config(args.config)
    except harness.ConfigValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except harness.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    written = harness.run_benchmark(cfg, args.out, jobs=args.jobs, timings=args.timings)
    for path in written:
        print(path)
    return EXIT_OK


def _cmd_validate(args):
    verdict = diagnostics.validate_params(args.alpha, args.beta, args.mu)
    print(verdict)
    if not verdict.feasible:
        for msg in verdict.messages():
            print(msg, file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def _cmd_beta_range(args):
    interval = diagnostics.feasible_beta_interval(args.alpha, args.mu)
    if interval is None:
        print("empty")
        return EXIT_INVALID
    print(interval)
    return EXIT_OK


def _cmd_oracle(args):
    prob = problems.builtin(args.problem)
    grid = oracle.GridSpec.for_set(prob.cset, args.step)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["set", "index"] + [f"x{i}" for i in range(prob.dim)])
    for kind, fn in (("S", oracle.brute_solutions), ("S_D", oracle.brute_dual_solutions)):
        for i, c in enumerate(fn(prob, grid, args.tol)):
            w.writerow([kind, i] + [repr(float(v)) for v in c])
    return EXIT_OK


def _cmd_list(args):
    print("problems:")
    for name in problems.catalog_names():
        print(f"  {name}")
    print("methods:")
    for name in solvers.method_names():
        print(f"  {name}")
    return EXIT_OK


_COMMANDS = {"run": _cmd_run, "validate": _cmd_validate, "beta-range": _cmd_beta_range,
             "oracle": _cmd_oracle, "list": _cmd_list}


def cli(argv=None):
    """Run the command line and return an exit code."""
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, LookupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID if isinstance(exc, solvers.ParameterError) else EXIT_USAGE
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main():
    sys.exit(cli())
