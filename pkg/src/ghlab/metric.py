"""Finite metric spaces and the scalar diagnostics computed on them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

__all__ = [
    "MetricError",
    "FiniteMetricSpace",
    "SpaceDiagnostics",
    "validate",
    "point_space",
    "diam",
    "s_value",
    "e_value",
    "is_general_position",
    "gh_to_point",
    "diagnostics",
    "random_general_position",
    "GenerationError",
]


class MetricError(ValueError):
    """A matrix fails one of the metric axioms."""

    def __init__(self, axiom: str, indices: tuple[int, ...], message: str):
        super().__init__(message)
        self.axiom = axiom
        self.indices = indices


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Points ``0..n-1`` with a symmetric distance matrix.

    Build instances through :func:`validate`; the constructor does not check
    the axioms.
    """

    d: np.ndarray

    def __post_init__(self):
        d = np.array(self.d, dtype=np.float64)
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return self.d.shape == other.d.shape and bool(np.array_equal(self.d, other.d))

    def __hash__(self) -> int:
        return hash((self.n, self.d.tobytes()))

    def __repr__(self) -> str:
        return f"FiniteMetricSpace(n={self.n})"

    def pair_distances(self) -> np.ndarray:
        """Upper-triangle distances, one per unordered pair of distinct points."""
        iu = np.triu_indices(self.n, k=1)
        return self.d[iu]

    def subspace(self, idx) -> "FiniteMetricSpace":
        idx = np.asarray(list(idx), dtype=int)
        return FiniteMetricSpace(self.d[np.ix_(idx, idx)])

    def tolist(self) -> list[list[float]]:
        return self.d.tolist()


def validate(matrix, tol: float = 0.0) -> FiniteMetricSpace:
    """Check the metric axioms and wrap ``matrix`` as a space.

    Raises :class:`MetricError` naming the first violated axiom. The triangle
    inequality is checked as ``d[i,k] <= d[i,j] + d[j,k] + tol`` and the
    error indices are reported as ``(i, k, j)``.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    d = np.asarray(matrix, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise MetricError("square", (), f"matrix must be square, got shape {d.shape}")
    n = d.shape[0]
    if n < 1:
        raise MetricError("square", (), "matrix must have at least one point")
    if not np.all(np.isfinite(d)):
        i, j = map(int, np.argwhere(~np.isfinite(d))[0])
        raise MetricError("finite", (i, j), f"non-finite distance at ({i},{j})")

    for i in range(n):
        if abs(d[i, i]) > tol:
            raise MetricError("zero-diagonal", (i,), f"d[{i}][{i}] = {d[i, i]} is not 0")
    for i in range(n):
        for j in range(i + 1, n):
            if abs(d[i, j] - d[j, i]) > tol:
                raise MetricError(
                    "symmetry", (i, j), f"d[{i}][{j}] = {d[i, j]} != d[{j}][{i}] = {d[j, i]}"
                )
    for i in range(n):
        for j in range(n):
            if i != j and not d[i, j] > tol:
                raise MetricError(
                    "positivity", (i, j), f"d[{i}][{j}] = {d[i, j]} is not positive"
                )
    # d[i,j] + d[j,k] for every (i,j,k); first violation in (i,k,j) lexicographic order
    through = d[:, :, None] + d[None, :, :]  # [i, j, k]
    bad = d[:, None, :] > through + tol
    if bad.any():
        viol = np.argwhere(bad.transpose(0, 2, 1))  # rows of (i, k, j)
        i, k, j = map(int, viol[0])
        raise MetricError(
            "triangle",
            (i, k, j),
            f"triangle inequality violated at ({i},{k},{j}): "
            f"d[{i}][{k}] = {d[i, k]} > d[{i}][{j}] + d[{j}][{k}] = {d[i, j] + d[j, k]}",
        )
    return FiniteMetricSpace(d)


def point_space() -> FiniteMetricSpace:
    """The one-point space."""
    return FiniteMetricSpace(np.zeros((1, 1)))


def diam(X: FiniteMetricSpace) -> float:
    return float(X.d.max())


def s_value(X: FiniteMetricSpace) -> float:
    """Smallest distance between distinct points; ``inf`` for a single point."""
    if X.n < 2:
        return math.inf
    return float(X.pair_distances().min())


def e_value(X: FiniteMetricSpace) -> float:
    """Smallest gap between distances of two different unordered pairs.

    ``inf`` when there are fewer than two pairs. Sorting reduces the pairwise
    comparison to adjacent differences.
    """
    vals = np.sort(X.pair_distances())
    if vals.size < 2:
        return math.inf
    return float(np.diff(vals).min())


def is_general_position(X: FiniteMetricSpace) -> bool:
    """All distances distinct and every triangle strict."""
    if X.n >= 3 and e_value(X) <= 0:
        return False
    d = X.d
    for i, j, k in combinations(range(X.n), 3):
        a, b, c = d[i, j], d[j, k], d[i, k]
        if not (a < b + c and b < a + c and c < a + b):
            return False
    return True


def gh_to_point(X: FiniteMetricSpace) -> float:
    """Gromov-Hausdorff distance to the one-point space, ``diam(X)/2``."""
    return diam(X) / 2


@dataclass(frozen=True)
class SpaceDiagnostics:
    diam: float
    s: float
    e: float
    general_position: bool

    def to_dict(self) -> dict:
        return {
            "diam": self.diam,
            "s": _json_float(self.s),
            "e": _json_float(self.e),
            "general_position": self.general_position,
        }


def _json_float(x: float):
    return "inf" if math.isinf(x) else x


def diagnostics(X: FiniteMetricSpace) -> SpaceDiagnostics:
    return SpaceDiagnostics(diam(X), s_value(X), e_value(X), is_general_position(X))


def _planar_proposal(rng: np.random.Generator, n: int, scale: float) -> np.ndarray:
    pts = rng.uniform(0.0, scale, size=(n, 2))
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt((diff**2).sum(-1))


def _banded_proposal(rng: np.random.Generator, n: int, scale: float, min_sep: float) -> np.ndarray:
    # Every distance in [scale, 2*scale): all triangles strict. One value per
    # stratum of width scale/N with jitter limited so neighbours stay min_sep apart.
    npairs = n * (n - 1) // 2
    room = max(0.0, 1.0 - npairs * min_sep)
    slots = rng.permutation(npairs) + rng.uniform(0.0, room, size=npairs)
    vals = scale * (1.0 + slots / npairs)
    d = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    d[iu] = vals
    return d + d.T


def random_general_position(
    n: int, seed: int, scale: float = 1.0, min_sep: float = 0.0, retries: int = 2000
) -> FiniteMetricSpace:
    """Seeded random space in general position with ``s, e >= min_sep*scale``.

    Proposals are distance matrices of uniform random points in a square of
    side ``scale``; if those keep failing (tight ``min_sep``) the second half
    of the budget draws stratified distances from ``[scale, 2*scale)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return point_space()
    rng = np.random.default_rng(seed)
    floor = min_sep * scale
    for attempt in range(retries):
        if attempt < retries // 2:
            d = _planar_proposal(rng, n, scale)
        else:
            d = _banded_proposal(rng, n, scale, min_sep)
        try:
            X = validate(d)
        except MetricError:
            continue
        if not is_general_position(X):
            continue
        if n >= 2 and s_value(X) < floor:
            continue
        if n >= 3 and e_value(X) < floor:
            continue
        return X
    raise GenerationError(
        f"no general-position space with n={n}, min_sep={min_sep} after {retries} tries"
    )
