"""Compact subsets of the real line as finite unions of closed intervals.

Every operation uses only ``+``, ``-``, ``/ 2``, ``min`` and ``max`` on the
endpoints, so endpoints may be floats or :class:`fractions.Fraction` and the
results stay exact for the latter.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .metric import FiniteMetricSpace

__all__ = [
    "IntervalUnion",
    "neighborhood",
    "intersection",
    "hausdorff_distance",
    "directed_deviation",
    "distance_to_set",
    "c_s",
    "diam_iu",
    "discretize",
    "discretize_points",
    "POINT_BUDGET",
    "CounterexampleReport",
    "theorem2_pair",
    "theorem2_report",
]

POINT_BUDGET = 200


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted, pairwise disjoint closed intervals separated by gaps.

    Intervals that overlap or touch are merged on construction.
    """

    intervals: tuple[tuple, ...]

    def __post_init__(self):
        raw = sorted((a, b) for a, b in self.intervals)
        if not raw:
            raise ValueError("interval union must be nonempty")
        merged: list[list] = []
        for a, b in raw:
            if a > b:
                raise ValueError(f"interval [{a}, {b}] has a > b")
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        object.__setattr__(self, "intervals", tuple((a, b) for a, b in merged))

    @classmethod
    def of(cls, *intervals) -> "IntervalUnion":
        return cls(tuple(tuple(iv) for iv in intervals))

    @classmethod
    def points(cls, *xs) -> "IntervalUnion":
        return cls(tuple((x, x) for x in xs))

    @property
    def lo(self):
        return self.intervals[0][0]

    @property
    def hi(self):
        return self.intervals[-1][1]

    def __contains__(self, x) -> bool:
        return any(a <= x <= b for a, b in self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def issubset(self, other: "IntervalUnion") -> bool:
        return all(
            any(c <= a and b <= d for c, d in other.intervals) for a, b in self.intervals
        )

    def gaps(self) -> list[tuple]:
        return [(b, a) for (_, b), (a, _) in zip(self.intervals, self.intervals[1:])]

    def map(self, fn) -> "IntervalUnion":
        return IntervalUnion(tuple((fn(a), fn(b)) for a, b in self.intervals))

    def to_float(self) -> "IntervalUnion":
        return self.map(float)

    def to_dict(self) -> dict:
        return {"intervals": [[float(a), float(b)] for a, b in self.intervals]}

    @classmethod
    def from_dict(cls, data: dict) -> "IntervalUnion":
        return cls(tuple((a, b) for a, b in data["intervals"]))


def neighborhood(A: IntervalUnion, r) -> IntervalUnion:
    """Closed ``r``-neighborhood: every ``[a, b]`` grows to ``[a - r, b + r]``."""
    if r < 0:
        raise ValueError(f"negative radius {r}")
    return IntervalUnion(tuple((a - r, b + r) for a, b in A.intervals))


def intersection(A: IntervalUnion, B: IntervalUnion) -> IntervalUnion | None:
    """Intersection of two unions, or ``None`` when it is empty."""
    out = []
    i = j = 0
    P, Q = A.intervals, B.intervals
    while i < len(P) and j < len(Q):
        lo = max(P[i][0], Q[j][0])
        hi = min(P[i][1], Q[j][1])
        if lo <= hi:
            out.append((lo, hi))
        if P[i][1] < Q[j][1]:
            i += 1
        else:
            j += 1
    return IntervalUnion(tuple(out)) if out else None


def distance_to_set(x, B: IntervalUnion):
    best = None
    for a, b in B.intervals:
        if x < a:
            d = a - x
        elif x > b:
            d = x - b
        else:
            return x - x  # zero of the endpoint type
        best = d if best is None or d < best else best
    return best


def directed_deviation(A: IntervalUnion, B: IntervalUnion):
    """``sup_{a in A} |aB|``.

    Distance to ``B`` is piecewise linear with local maxima only at gap
    midpoints of ``B``, so the supremum over ``A`` is attained at an endpoint
    of ``A`` or at a gap midpoint lying in ``A``.
    """
    candidates = [x for iv in A.intervals for x in iv]
    candidates += [m for lo, hi in B.gaps() if (m := (lo + hi) / 2) in A]
    return max(distance_to_set(x, B) for x in candidates)


def hausdorff_distance(A: IntervalUnion, B: IntervalUnion):
    return max(directed_deviation(A, B), directed_deviation(B, A))


def c_s(A: IntervalUnion, B: IntervalUnion, s, r=None) -> IntervalUnion:
    """``B_s(A) ∩ B_{r-s}(B)`` with ``r = d_H(A, B)``.

    For ``s`` in ``[0, r]`` the result is nonempty and lies at Hausdorff
    distance ``s`` from ``A`` and ``r - s`` from ``B``.
    """
    if r is None:
        r = hausdorff_distance(A, B)
    if not 0 <= s <= r:
        raise ValueError(f"s = {s} outside [0, {r}]")
    out = intersection(neighborhood(A, s), neighborhood(B, r - s))
    if out is None:
        raise ValueError("empty intersection; r is not the Hausdorff distance of A and B")
    return out


def diam_iu(A: IntervalUnion):
    return A.hi - A.lo


def _grid(a, b, step) -> list:
    pts = [a]
    k = 1
    while a + k * step < b:
        pts.append(a + k * step)
        k += 1
    if b != a:
        pts.append(b)
    return pts


def discretize(A: IntervalUnion, step, budget: int = POINT_BUDGET) -> FiniteMetricSpace:
    """Endpoints plus a uniform ``step`` grid inside each interval, with the line metric.

    The resulting point set is within Hausdorff distance ``step / 2`` of ``A``.
    """
    return discretize_points(A, step, budget)[1]


def discretize_points(A: IntervalUnion, step, budget: int = POINT_BUDGET):
    """Like :func:`discretize` but also returns the sample coordinates."""
    if not step > 0:
        raise ValueError("step must be positive")
    pts: list = []
    for a, b in A.intervals:
        pts.extend(_grid(a, b, step))
        if len(pts) > budget:
            raise ValueError(f"discretization exceeds {budget} points")
    x = np.array([float(p) for p in pts])
    return pts, FiniteMetricSpace(np.abs(x[:, None] - x[None, :]))


def as_fraction_union(pairs: Iterable[Sequence]) -> IntervalUnion:
    return IntervalUnion(tuple((Fraction(a), Fraction(b)) for a, b in pairs))


# --- the two-point counterexample ------------------------------------------


@dataclass(frozen=True)
class CounterexampleReport:
    """Numbers for ``A = [0, 2r]``, ``B = {0, 2r}`` and the curve ``s -> C_s(A, B)``.

    ``samples`` rows are ``(s, d_H(C_s, A), d_H(C_s, B), diam C_s)``;
    ``gh_lower_bounds`` rows are ``(step, d_GH(A_step, B), d_H(A, A_step), bound)``.
    """

    r: Fraction
    hausdorff_ab: Fraction
    midpoint_set: IntervalUnion
    midpoint_diam: Fraction
    midpoint_gh_to_point: Fraction
    samples: tuple
    additivity_sum: Fraction
    gh_lower_bounds: tuple

    @property
    def violation_margin(self) -> Fraction:
        return self.midpoint_gh_to_point - self.r

    @property
    def gh_upper_bound(self) -> Fraction:
        return self.hausdorff_ab

    def geodesic_ok(self) -> bool:
        return all(da == s and db == self.r - s for s, da, db, _ in self.samples)

    def to_dict(self) -> dict:
        return {
            "r": float(self.r),
            "d_H(A,B)": float(self.hausdorff_ab),
            "d_GH(A,B)_upper": float(self.gh_upper_bound),
            "d_GH(A,B)_lower": [
                {"step": float(h), "d_GH(A_h,B)": g, "d_H(A,A_h)": float(e), "lower": lb}
                for h, g, e, lb in self.gh_lower_bounds
            ],
            "c_mid": self.midpoint_set.to_dict()["intervals"],
            "diam(c_mid)": float(self.midpoint_diam),
            "d_GH(c_mid,point)": float(self.midpoint_gh_to_point),
            "violation_margin": float(self.violation_margin),
            "additivity_sum": float(self.additivity_sum),
            "samples": [
                {"s": float(s), "d_H(c_s,A)": float(da), "d_H(c_s,B)": float(db), "diam": float(dm)}
                for s, da, db, dm in self.samples
            ],
        }


def theorem2_pair(r) -> tuple[IntervalUnion, IntervalUnion]:
    r = Fraction(r)
    return IntervalUnion.of((0 * r, 2 * r)), IntervalUnion.points(0 * r, 2 * r)


def theorem2_report(r=1, grid: int = 11, steps=None) -> CounterexampleReport:
    """Exact evaluation of the counterexample with rational arithmetic.

    ``d_GH(A, B)`` is bounded above by ``d_H(A, B)`` and below, for each
    discretization step ``h`` of ``A``, by ``d_GH(A_h, B) - d_H(A, A_h)``
    where the first term comes from the exact solver.
    """
    from .solver import gh_exact

    r = Fraction(r)
    if r <= 0:
        raise ValueError("r must be positive")
    if grid < 2:
        raise ValueError("grid needs at least two points")
    A, B = theorem2_pair(r)
    dh = hausdorff_distance(A, B)

    s_vals = [r * i / (grid - 1) for i in range(grid)]
    curve = [c_s(A, B, s, dh) for s in s_vals]
    samples = tuple(
        (s, hausdorff_distance(c, A), hausdorff_distance(c, B), diam_iu(c))
        for s, c in zip(s_vals, curve)
    )
    additivity = sum(
        (hausdorff_distance(a, b) for a, b in zip(curve, curve[1:])), Fraction(0)
    )
    mid = c_s(A, B, r / 2, dh)

    if steps is None:
        steps = [r / 2, r / 4, r / 8, r / 16]
    Bspace = discretize(B, r)
    bounds = []
    for h in steps:
        h = Fraction(h)
        pts, Ah = discretize_points(A, h)
        err = hausdorff_distance(A, IntervalUnion.points(*pts))
        g = gh_exact(Ah, Bspace).distance
        bounds.append((h, g, err, g - float(err)))

    return CounterexampleReport(
        r=r,
        hausdorff_ab=dh,
        midpoint_set=mid,
        midpoint_diam=diam_iu(mid),
        midpoint_gh_to_point=diam_iu(mid) / 2,
        samples=samples,
        additivity_sum=additivity,
        gh_lower_bounds=tuple(bounds),
    )
