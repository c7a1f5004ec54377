"""Vectors, closed convex sets and exact metric projections.

Vectors are plain 1-D ``float64`` numpy arrays; :func:`as_vector` is the single
gate that validates them. Sets are frozen dataclasses and projections dispatch
to the kernel backend (compiled when available).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels

__all__ = [
    "DimensionError",
    "ProjectionNotConverged",
    "as_vector",
    "WholeSpace",
    "Box",
    "Ball",
    "Halfspace",
    "HalfspaceIntersection",
    "Simplex",
    "project",
    "contains",
    "bounding_box",
    "residual",
]

# half-width of the sampling box used for unbounded sets
UNBOUNDED_RADIUS = 10.0


class DimensionError(ValueError):
    """Vector length does not match the ambient dimension of a set or operator."""


class ProjectionNotConverged(RuntimeError):
    """Cyclic projection hit its sweep cap. ``best`` holds the last iterate."""

    def __init__(self, message, best, sweeps):
        super().__init__(message)
        self.best = best
        self.sweeps = sweeps


def as_vector(values, dim=None, name="vector"):
    """Return ``values`` as a finite, contiguous 1-D float64 array."""
    v = np.ascontiguousarray(values, dtype=np.float64)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"{name} must be a non-empty 1-D array, got shape {v.shape}")
    if dim is not None and v.size != dim:
        raise DimensionError(f"{name} has dimension {v.size}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite components")
    return v


def _frozen(arr):
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class WholeSpace:
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")


@dataclass(frozen=True, eq=False)
class Box:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = as_vector(self.lower, name="lower")
        hi = as_vector(self.upper, dim=lo.size, name="upper")
        if np.any(lo > hi):
            raise ValueError("Box requires lower <= upper componentwise")
        object.__setattr__(self, "lower", _frozen(lo))
        object.__setattr__(self, "upper", _frozen(hi))

    @property
    def dim(self):
        return self.lower.size


@dataclass(frozen=True, eq=False)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(as_vector(self.center, name="center")))
        if not self.radius > 0 or not np.isfinite(self.radius):
            raise ValueError("Ball radius must be positive and finite")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self):
        return self.center.size


@dataclass(frozen=True, eq=False)
class Halfspace:
    """The set ``{x : <normal, x> <= offset}``."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = as_vector(self.normal, name="normal")
        if not np.any(n):
            raise ValueError("Halfspace normal must be nonzero")
        object.__setattr__(self, "normal", _frozen(n))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self):
        return self.normal.size


@dataclass(frozen=True, eq=False)
class HalfspaceIntersection:
    """Polyhedron ``{x : <n_i, x> <= b_i for all i}``, projected by Dykstra sweeps.

    Nonemptiness is the caller's responsibility; an empty intersection shows
    up as :class:`ProjectionNotConverged`.
    """

    halfspaces: tuple
    max_sweeps: int = 10_000
    tol: float = 1e-12
    normals: np.ndarray = field(init=False, repr=False)
    offsets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        hs = tuple(self.halfspaces)
        if not hs:
            raise ValueError("HalfspaceIntersection needs at least one halfspace")
        dim = hs[0].dim
        if any(h.dim != dim for h in hs):
            raise DimensionError("halfspaces have mixed dimensions")
        object.__setattr__(self, "halfspaces", hs)
        object.__setattr__(self, "normals", _frozen(np.ascontiguousarray([h.normal for h in hs])))
        object.__setattr__(self, "offsets", _frozen(np.array([h.offset for h in hs])))

    @property
    def dim(self):
        return self.normals.shape[1]


@dataclass(frozen=True)
class Simplex:
    """Scaled probability simplex ``{x >= 0 : sum(x) = scale}``."""

    dim: int
    scale: float = 1.0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not self.scale > 0:
            raise ValueError("Simplex scale must be positive")


def project(cset, v):
    """Metric projection of ``v`` onto ``cset``.

    Closed-form for every variant except :class:`HalfspaceIntersection`, which
    runs Dykstra's cyclic scheme and raises :class:`ProjectionNotConverged`
    when its sweep cap is reached.
    """
    v = as_vector(v, dim=cset.dim)
    if isinstance(cset, WholeSpace):
        return v.copy()
    if isinstance(cset, Box):
        return kernels.project_box(v, cset.lower, cset.upper)
    if isinstance(cset, Ball):
        return kernels.project_ball(v, cset.center, cset.radius)
    if isinstance(cset, Halfspace):
        return kernels.project_halfspace(v, cset.normal, cset.offset)
    if isinstance(cset, Simplex):
        return kernels.project_simplex(v, cset.scale)
    if isinstance(cset, HalfspaceIntersection):
        z, sweeps, ok = kernels.project_halfspaces(
            v, cset.normals, cset.offsets, cset.max_sweeps, cset.tol)
        if not ok:
            raise ProjectionNotConverged(
                f"cyclic projection did not converge in {sweeps} sweeps", z, sweeps)
        return z
    raise TypeError(f"unsupported set type {type(cset).__name__}")


def contains(cset, x, tol=1e-10):
    """Membership test up to ``tol`` (distance to the set)."""
    x = as_vector(x, dim=cset.dim)
    return kernels.dist(x, project(cset, x)) <= tol


def bounding_box(cset):
    """Axis-aligned box ``(lo, hi)`` covering ``cset``.

    Unbounded sets get ``[-UNBOUNDED_RADIUS, UNBOUNDED_RADIUS]`` per axis; this
    is the sampling window for random starts, classification and grids.
    """
    n = cset.dim
    if isinstance(cset, Box):
        return cset.lower.copy(), cset.upper.copy()
    if isinstance(cset, Ball):
        return cset.center - cset.radius, cset.center + cset.radius
    if isinstance(cset, Simplex):
        return np.zeros(n), np.full(n, cset.scale)
    return np.full(n, -UNBOUNDED_RADIUS), np.full(n, UNBOUNDED_RADIUS)


def residual(problem, x, psi=1.0):
    """Natural-map residual ``||x - P_C(x - psi * A(x))||``; zero exactly at solutions."""
    if not psi > 0:
        raise ValueError("psi must be positive")
    x = as_vector(x, dim=problem.dim)
    z = project(problem.cset, x - psi * problem.operator(x))
    return kernels.dist(x, z)
