"""Shortest curves between finite metric spaces built from an optimal correspondence."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metric import FiniteMetricSpace, diam
from .solver import Correspondence, distortion, gh_exact

__all__ = [
    "GeodesicCurve",
    "make_geodesic",
    "evaluate",
    "interior_diam",
    "polyline_length",
    "uniform_grid",
    "interpolate_distances",
]


@dataclass(frozen=True)
class GeodesicCurve:
    X: FiniteMetricSpace
    Y: FiniteMetricSpace
    R: Correspondence
    gh: float

    def __call__(self, t: float) -> FiniteMetricSpace:
        return evaluate(self, t)

    def to_dict(self) -> dict:
        return {"gh": self.gh, "correspondence": self.R.to_dict()}


def make_geodesic(
    X: FiniteMetricSpace, Y: FiniteMetricSpace, node_budget: int | None = None
) -> GeodesicCurve:
    res = gh_exact(X, Y, node_budget=node_budget)
    if not res.exact:
        raise RuntimeError(
            f"solver stopped at node budget with d_GH in [{res.lower}, {res.upper}]"
        )
    return GeodesicCurve(X, Y, res.witness, res.distance)


def interpolate_distances(a: np.ndarray, b: np.ndarray, t: float) -> np.ndarray:
    """``(1-t)*a + t*b`` elementwise, clipped to ``[min(a,b), max(a,b)]``.

    The clip only removes rounding overshoot; the exact value always lies
    between the endpoints.
    """
    mixed = (1.0 - t) * a + t * b
    return np.clip(mixed, np.minimum(a, b), np.maximum(a, b))


def evaluate(curve: GeodesicCurve, t: float) -> FiniteMetricSpace:
    """The space at parameter ``t``.

    The endpoints are returned as given. Inside ``(0, 1)`` the points are the
    pairs of the correspondence, in sorted order.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t = {t} outside [0, 1]")
    if t == 0.0:
        return curve.X
    if t == 1.0:
        return curve.Y
    idx = np.array(curve.R.pairs, dtype=int)
    xs, ys = idx[:, 0], idx[:, 1]
    d = interpolate_distances(curve.X.d[np.ix_(xs, xs)], curve.Y.d[np.ix_(ys, ys)], t)
    off = ~np.eye(len(idx), dtype=bool)
    assert np.all(d[off] > 0), "distinct pairs must stay apart for interior t"
    return FiniteMetricSpace(d)


def interior_diam(curve: GeodesicCurve, t: float) -> float:
    return diam(evaluate(curve, t))


def uniform_grid(k: int) -> np.ndarray:
    """``k`` evenly spaced parameters from 0 to 1 inclusive."""
    if k < 2:
        raise ValueError("grid needs at least two points")
    return np.linspace(0.0, 1.0, k)


def polyline_length(curve: GeodesicCurve, ts) -> float:
    """Sum of exact distances between consecutive samples of the curve."""
    ts = [float(t) for t in ts]
    if len(ts) < 2 or ts[0] != 0.0 or ts[-1] != 1.0:
        raise ValueError("grid must start at 0 and end at 1")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("grid must be strictly increasing")
    spaces = [evaluate(curve, t) for t in ts]
    return sum(gh_exact(a, b).distance for a, b in zip(spaces, spaces[1:]))


def check_witness(curve: GeodesicCurve) -> bool:
    return distortion(curve.R, curve.X, curve.Y) / 2 == curve.gh
