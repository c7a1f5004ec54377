"""Operators, variational inequality problems and the built-in catalog.

An operator is one of three frozen specs (:class:`Affine`, :class:`Componentwise`,
:class:`Composite`); :func:`evaluate` is the only place they are applied, so
finiteness and dimension checks live in one spot.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

from . import geometry
from .geometry import Ball, Box, WholeSpace, as_vector

__all__ = [
    "ConfigurationError",
    "EvaluationError",
    "CatalogError",
    "Affine",
    "Componentwise",
    "Composite",
    "VIProblem",
    "SCALAR_MAPS",
    "register_operator",
    "evaluate",
    "spectral_norm_estimate",
    "hphard_matrix",
    "builtin",
    "catalog_names",
    "load_affine",
    "sample_points",
    "ClassificationReport",
    "classify_sample",
]


class ConfigurationError(ValueError):
    """An operator or problem refers to something that does not exist."""


class EvaluationError(ArithmeticError):
    """Operator produced a non-finite value."""


class CatalogError(LookupError):
    def __str__(self):
        return str(self.args[0])


# 1-D closed-form maps available to Componentwise operators
SCALAR_MAPS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "identity": lambda t: t,
    "neg": lambda t: -t,
    "square": lambda t: t * t,
    "cube": lambda t: t * t * t,
    "one": lambda t: np.ones_like(t),
    "zero": lambda t: np.zeros_like(t),
    "sin": np.sin,
    "atan": np.arctan,
}

_COMPOSITES: dict[str, Callable[[np.ndarray], np.ndarray]] = {}


def register_operator(name, fn):
    """Register ``fn`` so :class:`Composite` operators can refer to it by name."""
    _COMPOSITES[name] = fn


def spectral_norm_estimate(M, iters=500, tol=1e-13):
    """Largest singular value of ``M`` by power iteration on ``M^T M``."""
    M = np.asarray(M, dtype=np.float64)
    v = np.ones(M.shape[1]) / np.sqrt(M.shape[1])
    sigma = 0.0
    for _ in range(iters):
        u = M.T @ (M @ v)
        nrm = float(np.linalg.norm(u))
        if nrm == 0.0:
            return 0.0
        v = u / nrm
        new = float(np.sqrt(nrm))
        if abs(new - sigma) <= tol * max(1.0, new):
            return new
        sigma = new
    return sigma


@dataclass(frozen=True, eq=False)
class Affine:
    """``A(x) = M x + q``."""

    M: np.ndarray
    q: np.ndarray
    lipschitz: float | None = None
    label: str = "affine"

    def __post_init__(self):
        M = np.ascontiguousarray(self.M, dtype=np.float64)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise geometry.DimensionError(f"M must be square, got shape {M.shape}")
        q = as_vector(self.q, dim=M.shape[0], name="q")
        M.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "q", q)
        if self.lipschitz is not None:
            est = spectral_norm_estimate(M)
            if self.lipschitz < est - 1e-6:
                raise ValueError(
                    f"declared Lipschitz constant {self.lipschitz} is below the "
                    f"spectral norm estimate {est:.6g} of M")

    @property
    def dim(self):
        return self.M.shape[0]


@dataclass(frozen=True)
class Componentwise:
    """``A(x)_i = f_i(x_i)`` with each ``f_i`` named in :data:`SCALAR_MAPS`."""

    maps: tuple
    lipschitz: float | None = None
    label: str = "componentwise"

    def __post_init__(self):
        maps = (self.maps,) if isinstance(self.maps, str) else tuple(self.maps)
        unknown = [m for m in maps if m not in SCALAR_MAPS]
        if unknown:
            raise ConfigurationError(
                f"unknown scalar map(s) {unknown}; available: {sorted(SCALAR_MAPS)}")
        object.__setattr__(self, "maps", maps)

    @property
    def dim(self):
        return len(self.maps)


@dataclass(frozen=True)
class Composite:
    """Operator looked up by name in the :func:`register_operator` registry."""

    name: str
    dim: int
    lipschitz: float | None = None
    label: str = ""


def evaluate(op, x):
    """Apply ``op`` to ``x``; raises :class:`EvaluationError` on non-finite output."""
    x = as_vector(x, dim=op.dim)
    # overflow is reported below as an EvaluationError, not a warning
    with np.errstate(over="ignore", invalid="ignore"):
        out = _apply(op, x)
    if not np.all(np.isfinite(out)):
        raise EvaluationError(f"operator {op.label or type(op).__name__!r} returned non-finite values")
    return out


def _apply(op, x):
    if isinstance(op, Affine):
        out = op.M @ x + op.q
    elif isinstance(op, Componentwise):
        if len(set(op.maps)) == 1:
            out = SCALAR_MAPS[op.maps[0]](x)
        else:
            out = np.array([SCALAR_MAPS[m](x[i:i + 1])[0] for i, m in enumerate(op.maps)])
    elif isinstance(op, Composite):
        try:
            fn = _COMPOSITES[op.name]
        except KeyError:
            raise ConfigurationError(
                f"composite operator {op.name!r} is not registered; "
                f"registered: {sorted(_COMPOSITES)}") from None
        out = np.asarray(fn(x), dtype=np.float64)
        if out.shape != x.shape:
            raise geometry.DimensionError(
                f"operator {op.name!r} returned shape {out.shape}, expected {x.shape}")
    else:
        raise TypeError(f"unsupported operator type {type(op).__name__}")
    return out


@dataclass(frozen=True, eq=False)
class VIProblem:
    """``VI(C, A)`` plus optionally known primal (S) and dual (S_D) solutions."""

    op: object
    cset: object
    known_solutions: tuple = ()
    known_dual_solutions: tuple = ()
    label: str = ""

    def __post_init__(self):
        if self.op.dim != self.cset.dim:
            raise geometry.DimensionError(
                f"operator dimension {self.op.dim} != set dimension {self.cset.dim}")
        sols = tuple(as_vector(s, dim=self.dim, name="known solution")
                     for s in self.known_solutions)
        duals = tuple(as_vector(s, dim=self.dim, name="known dual solution")
                      for s in self.known_dual_solutions)
        object.__setattr__(self, "known_solutions", sols)
        object.__setattr__(self, "known_dual_solutions", duals)
        for q in duals:
            r = geometry.residual(self, q)
            if r > 1e-8:
                raise ValueError(f"listed dual solution {q} has residual {r:.3g} > 1e-8")

    @property
    def dim(self):
        return self.cset.dim

    @property
    def lipschitz(self):
        return self.op.lipschitz

    def operator(self, x):
        return evaluate(self.op, x)

    def project(self, v):
        return geometry.project(self.cset, v)


# ---------------------------------------------------------------------------
# catalog

# generator defaults for the HpHard family
HPHARD_ENTRY_RANGE = 5.0
HPHARD_DENSITY = 1.0
HPHARD_DIAG_RANGE = (1.0, 2.0)


def hphard_matrix(n, seed=42, entry_range=HPHARD_ENTRY_RANGE,
                  density=HPHARD_DENSITY, diag_range=HPHARD_DIAG_RANGE):
    """``M = N^T N + B + D`` with ``B`` skew-symmetric and ``D`` positive diagonal."""
    rng = np.random.default_rng(seed)

    def sparse_uniform():
        vals = rng.uniform(-entry_range, entry_range, size=(n, n))
        return vals * (rng.random((n, n)) < density)

    N = sparse_uniform()
    S = sparse_uniform()
    B = S - S.T
    D = np.diag(rng.uniform(*diag_range, size=n))
    return N.T @ N + B + D


def _identity_box(n):
    return VIProblem(
        Affine(np.eye(n), np.zeros(n), lipschitz=1.0, label="identity"),
        Box(-np.ones(n), np.ones(n)),
        known_solutions=(np.zeros(n),), known_dual_solutions=(np.zeros(n),),
        label="identity-box" if n == 2 else f"identity-box-{n}")


def _rotation_ball():
    R = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return VIProblem(
        Affine(R, np.zeros(2), lipschitz=1.0, label="rotation"),
        Ball(np.zeros(2), 1.0),
        known_solutions=(np.zeros(2),), known_dual_solutions=(np.zeros(2),),
        label="rotation-ball")


def _quasi_square():
    # x -> x^2 is not globally Lipschitz, so no constant is declared
    return VIProblem(
        Componentwise(("square",), label="square"),
        Box([-1.0], [1.0]),
        known_solutions=([-1.0], [0.0]), known_dual_solutions=([-1.0],),
        label="quasi-square-1d")


def _square_line():
    return VIProblem(
        Componentwise(("square",), label="square"),
        WholeSpace(1),
        known_solutions=([0.0],), known_dual_solutions=(),
        label="square-line-1d")


def _neg_interval():
    return VIProblem(
        Componentwise(("neg",), lipschitz=1.0, label="neg"),
        Box([-1.0], [1.0]),
        known_solutions=([-1.0], [0.0], [1.0]), known_dual_solutions=(),
        label="neg-interval-1d")


def _hphard(n, seed):
    M = hphard_matrix(n, seed)
    L = float(np.linalg.norm(M, 2))
    return VIProblem(
        Affine(M, np.zeros(n), lipschitz=L, label="hphard"),
        Box(-np.ones(n), np.ones(n)),
        known_solutions=(np.zeros(n),), known_dual_solutions=(np.zeros(n),),
        label=f"affine-hphard-{n}")


_FIXED = {
    "identity-box": lambda seed: _identity_box(2),
    "rotation-ball": lambda seed: _rotation_ball(),
    "quasi-square-1d": lambda seed: _quasi_square(),
    "square-line-1d": lambda seed: _square_line(),
    "neg-interval-1d": lambda seed: _neg_interval(),
}
_PARAMETRIC = {
    "identity-box": lambda n, seed: _identity_box(n),
    "affine-hphard": _hphard,
}


def catalog_names():
    """Catalog entries; ``<family>-<n>`` entries take any dimension ``n >= 1``."""
    return sorted(_FIXED) + [f"{fam}-<n>" for fam in sorted(_PARAMETRIC)]


def builtin(name, seed=42):
    """Look up a catalog problem by name (``seed`` only affects random families)."""
    if name in _FIXED:
        return _FIXED[name](seed)
    m = re.fullmatch(r"(.+)-(\d+)", name)
    if m and m.group(1) in _PARAMETRIC and int(m.group(2)) >= 1:
        return _PARAMETRIC[m.group(1)](int(m.group(2)), seed)
    raise CatalogError(f"unknown problem {name!r}; available: {', '.join(catalog_names())}")


def load_affine(path):
    """Read an affine problem from a whitespace-separated text file.

    Layout: ``n``, then the ``n*n`` entries of ``M`` row-major, then the ``n``
    entries of ``q``. An optional trailing block of ``2n`` numbers gives box
    bounds (``n`` lower then ``n`` upper); without it ``C`` is the whole space.
    Lines starting with ``#`` are comments.
    """
    path = Path(path)
    tokens = []
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())
    if not tokens:
        raise ConfigurationError(f"{path}: empty matrix file")
    try:
        n = int(tokens[0])
        vals = [float(t) for t in tokens[1:]]
    except ValueError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
    if n < 1 or len(vals) not in (n * n + n, n * n + 3 * n):
        raise ConfigurationError(
            f"{path}: expected {n * n + n} or {n * n + 3 * n} numbers after n={n}, got {len(vals)}")
    M = np.array(vals[:n * n]).reshape(n, n)
    q = np.array(vals[n * n:n * n + n])
    if len(vals) == n * n + 3 * n:
        cset = Box(vals[n * n + n:n * n + 2 * n], vals[n * n + 2 * n:])
    else:
        cset = WholeSpace(n)
    L = float(np.linalg.norm(M, 2)) or None
    return VIProblem(Affine(M, q, lipschitz=L, label=path.stem), cset, label=path.stem)


# ---------------------------------------------------------------------------
# randomized classification

def sample_points(cset, count, rng, max_tries=1000):
    """``count`` points of ``cset`` drawn from ``rng``.

    Boxes and whole spaces sample the (bounding) box uniformly, simplices use a
    flat Dirichlet, balls and halfspace sets use rejection from the bounding box.
    """
    lo, hi = geometry.bounding_box(cset)
    n = cset.dim
    if isinstance(cset, (Box, WholeSpace)):
        return rng.uniform(lo, hi, size=(count, n))
    if isinstance(cset, geometry.Simplex):
        return rng.dirichlet(np.ones(n), size=count) * cset.scale
    out = []
    for _ in range(max_tries):
        cand = rng.uniform(lo, hi, size=(max(count, 64), n))
        if isinstance(cset, Ball):
            ok = np.linalg.norm(cand - cset.center, axis=1) <= cset.radius
        elif isinstance(cset, geometry.Halfspace):
            ok = cand @ cset.normal <= cset.offset
        else:
            ok = np.all(cand @ cset.normals.T <= cset.offsets, axis=1)
        out.extend(cand[ok])
        if len(out) >= count:
            return np.array(out[:count])
    raise RuntimeError(f"rejection sampling produced {len(out)} of {count} points")


class ClassificationReport(NamedTuple):
    pairs: int
    monotone_violations: int
    pseudomonotone_violations: int
    quasimonotone_violations: int

    def not_refuted(self, kind):
        return getattr(self, f"{kind}_violations") == 0


def classify_sample(op, cset, pairs, seed, tol=1e-12):
    """Count sampled violations of monotone / pseudomonotone / quasimonotone.

    Each pair ``(x, y)`` is checked in both orders. A class is "not refuted"
    when it has zero violations; that is evidence, not proof.
    """
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    rng = np.random.default_rng(seed)
    X = sample_points(cset, pairs, rng)
    Y = sample_points(cset, pairs, rng)
    mono = pseudo = quasi = 0
    for x, y in zip(X, Y):
        ax, ay = evaluate(op, x), evaluate(op, y)
        if np.dot(ax - ay, x - y) < -tol:
            mono += 1
        for (u, au), (v, av) in (((x, ax), (y, ay)), ((y, ay), (x, ax))):
            lhs = np.dot(au, v - u)
            rhs = np.dot(av, v - u)
            if lhs >= 0 and rhs < -tol:
                pseudo += 1
            if lhs > tol and rhs < -tol:
                quasi += 1
    return ClassificationReport(pairs, mono, pseudo, quasi)
