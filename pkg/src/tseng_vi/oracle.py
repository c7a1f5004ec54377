"""Brute-force solution sets on a grid, used as ground truth for the solvers.

Everything here is deliberately naive: the feasible set is discretized, the
inequality's quantifier runs over the same grid, and hits are merged into
clusters. Only :func:`geometry.contains` and the operator are shared with the
solver code path.

Caveats: discretizing the quantifier can admit false positives within O(step)
of the true solution set's boundary. Unbounded sets are gridded over their
bounding window, so the oracle solves the truncated problem and may report
points on the window's edge (``square-line-1d`` yields -10 besides 0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry
from ._backend import kernels
from .problems import evaluate

__all__ = ["GridCapError", "GridSpec", "grid_points", "cluster",
           "brute_solutions", "brute_dual_solutions"]

MAX_POINTS = 10_000_000


class GridCapError(ValueError):
    """The requested grid exceeds the point cap."""


@dataclass(frozen=True)
class GridSpec:
    """Per-axis ``(lo, hi)`` ranges and a common step."""

    ranges: tuple
    step: float
    max_points: int = MAX_POINTS

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("grid step must be positive")
        if any(hi < lo for lo, hi in self.ranges):
            raise ValueError("grid ranges must have lo <= hi")

    @classmethod
    def for_set(cls, cset, step=None):
        """Grid over ``cset``'s bounding box; default step 1e-3 in 1-D, 1e-2 otherwise."""
        lo, hi = geometry.bounding_box(cset)
        if step is None:
            step = 1e-3 if cset.dim == 1 else 1e-2
        return cls(tuple(zip(lo.tolist(), hi.tolist())), step)

    def axes(self):
        out = []
        for lo, hi in self.ranges:
            num = int(round((hi - lo) / self.step)) + 1
            out.append(np.linspace(lo, hi, num))
        return out

    def size(self):
        return int(np.prod([int(round((hi - lo) / self.step)) + 1 for lo, hi in self.ranges]))


def grid_points(problem, grid, member_tol=1e-12):
    """Grid points lying in the feasible set, in lexicographic order."""
    if problem.dim > 3:
        raise ValueError(f"oracle supports dimension <= 3, got {problem.dim}")
    if len(grid.ranges) != problem.dim:
        raise geometry.DimensionError("grid dimension does not match problem")
    if grid.size() > grid.max_points:
        raise GridCapError(f"grid has {grid.size()} points, cap is {grid.max_points}")
    mesh = np.meshgrid(*grid.axes(), indexing="ij")
    pts = np.ascontiguousarray(np.stack([m.ravel() for m in mesh], axis=1))
    keep = np.array([geometry.contains(problem.cset, p, member_tol) for p in pts])
    return np.ascontiguousarray(pts[keep])


def cluster(points, radius):
    """Single-linkage clusters (linking distance ``radius``) collapsed to centroids,
    sorted lexicographically."""
    points = np.asarray(points, dtype=np.float64)
    if points.size == 0:
        return []
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    order = np.lexsort(points.T[::-1])
    pts = points[order]
    for i in range(n):
        # rows are sorted on the first axis, so the scan can stop early
        for j in range(i + 1, n):
            if pts[j, 0] - pts[i, 0] > radius:
                break
            if np.linalg.norm(pts[j] - pts[i]) <= radius * (1 + 1e-9):
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(pts[i])
    cents = [np.mean(g, axis=0) for g in groups.values()]
    cents.sort(key=lambda c: tuple(c))
    return cents


def _scan(problem, grid, tol, dual):
    pts = grid_points(problem, grid)
    vals = np.ascontiguousarray([evaluate(problem.op, p) for p in pts])
    mask = kernels.vi_scan(pts, vals, dual, tol)
    return cluster(pts[mask], 2 * grid.step)


def brute_solutions(problem, grid=None, tol=1e-9):
    """Grid points ``x*`` with ``<A x*, z - x*> >= -tol`` for every grid ``z`` in C."""
    grid = grid or GridSpec.for_set(problem.cset)
    return _scan(problem, grid, tol, dual=False)


def brute_dual_solutions(problem, grid=None, tol=1e-9):
    """Grid points ``x*`` with ``<A z, z - x*> >= -tol`` for every grid ``z`` in C."""
    grid = grid or GridSpec.for_set(problem.cset)
    return _scan(problem, grid, tol, dual=True)
