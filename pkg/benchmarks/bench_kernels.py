"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Per-call kernel timings use ``timeit``; the end-to-end rows run a full
solve and an oracle scan in a subprocess with each backend forced through
``TSENG_VI_PURE_PYTHON``.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from tseng_vi import _backend

END_TO_END = """
import time
import numpy as np
from tseng_vi import builtin, solve, SolverParams, StoppingRule, BACKEND
from tseng_vi.oracle import brute_solutions
t = time.perf_counter()
solve(builtin("affine-hphard-8"), "alg3", SolverParams(), StoppingRule(), np.full(8, 0.5),
      keep_history=False)
t_solve = time.perf_counter() - t
t = time.perf_counter()
brute_solutions(builtin("rotation-ball"))
print(BACKEND, t_solve, time.perf_counter() - t)
"""


def kernel_cases(rng):
    v8 = rng.normal(size=8)
    normals = rng.normal(size=(6, 8))
    offsets = rng.uniform(0.1, 1.0, 6)
    pts = np.linspace(-1, 1, 4001).reshape(-1, 1)
    return {
        "project_box (n=8)": lambda k: k.project_box(v8, -np.ones(8), np.ones(8)),
        "project_ball (n=8)": lambda k: k.project_ball(v8, np.zeros(8), 1.0),
        "project_simplex (n=8)": lambda k: k.project_simplex(v8, 1.0),
        "project_halfspaces (6 in R^8)": lambda k: k.project_halfspaces(
            5 * v8, normals, offsets, 10000, 1e-12),
        "vi_scan (4001 pts, dual)": lambda k: k.vi_scan(pts, pts ** 2, True, 1e-9),
    }


def per_call(fn, repeat):
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = {"python": _backend.load("python")}
    try:
        backends["cython"] = _backend.load("cython")
    except ImportError:
        print("compiled extension not built; only the numpy backend is timed")

    cases = kernel_cases(np.random.default_rng(0))
    print(f"{'kernel':34s}" + "".join(f"{b:>14s}" for b in backends) + "     speedup")
    for name, case in cases.items():
        times = {b: per_call(lambda: case(k), args.repeat) for b, k in backends.items()}
        cols = "".join(f"{times[b] * 1e6:11.2f} us" for b in backends)
        speed = f"{times['python'] / times['cython']:9.1f}x" if "cython" in times else ""
        print(f"{name:34s}{cols}  {speed}")

    print()
    print(f"{'end to end':34s}{'solve hphard-8':>16s}{'oracle rotation':>17s}")
    for flag in ("1", "0") if "cython" in backends else ("1",):
        env = {**os.environ, "TSENG_VI_PURE_PYTHON": flag}
        out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, check=True,
                             capture_output=True, text=True).stdout.split()
        print(f"{out[0]:34s}{float(out[1]):14.3f} s{float(out[2]):15.3f} s")


if __name__ == "__main__":
    main()
