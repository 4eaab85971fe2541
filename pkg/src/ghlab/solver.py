"""Distortion of relations and exact Gromov-Hausdorff distance.

Two independent routes to the same number:

* :func:`gh_exact_bruteforce` enumerates every correspondence of a small grid.
* :func:`gh_exact` searches pairs of maps ``f: X -> Y``, ``g: Y -> X`` by
  branch-and-bound. Any correspondence contains one generated by such a pair,
  with no larger distortion, so the minimum is the same.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .metric import FiniteMetricSpace, diam

__all__ = [
    "Relation",
    "Correspondence",
    "GHResult",
    "BudgetExceeded",
    "distortion",
    "pair_cost_matrix",
    "enumerate_correspondences",
    "gh_exact_bruteforce",
    "optimal_correspondences_bruteforce",
    "gh_exact",
    "gh_lower_bound",
    "gh_upper_bound",
    "greedy_correspondence",
    "function_pair_subcorrespondence",
    "ENUMERATION_BUDGET",
]

ENUMERATION_BUDGET = 20


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Relation:
    """A nonempty set of index pairs ``(i, j)``, ``i < nx``, ``j < ny``.

    Pairs are kept sorted so equal relations compare equal.
    """

    pairs: tuple[tuple[int, int], ...]
    nx: int
    ny: int

    def __post_init__(self):
        pairs = tuple(sorted({(int(i), int(j)) for i, j in self.pairs}))
        if not pairs:
            raise ValueError("relation must be nonempty")
        for i, j in pairs:
            if not (0 <= i < self.nx and 0 <= j < self.ny):
                raise ValueError(f"pair ({i},{j}) outside sides {self.nx}x{self.ny}")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def image(self, i: int) -> list[int]:
        return [b for a, b in self.pairs if a == i]

    def preimage(self, j: int) -> list[int]:
        return [a for a, b in self.pairs if b == j]

    def transpose(self):
        return type(self)(tuple((j, i) for i, j in self.pairs), self.ny, self.nx)

    def to_dict(self) -> dict:
        return {"nx": self.nx, "ny": self.ny, "pairs": [list(p) for p in self.pairs]}

    @classmethod
    def from_dict(cls, data: dict):
        return cls(tuple(tuple(p) for p in data["pairs"]), int(data["nx"]), int(data["ny"]))


class Correspondence(Relation):
    """A relation whose projections onto both sides are surjective."""

    def __post_init__(self):
        super().__post_init__()
        left = {i for i, _ in self.pairs}
        right = {j for _, j in self.pairs}
        if len(left) != self.nx:
            missing = min(set(range(self.nx)) - left)
            raise ValueError(f"X-side point {missing} is not covered")
        if len(right) != self.ny:
            missing = min(set(range(self.ny)) - right)
            raise ValueError(f"Y-side point {missing} is not covered")

    @classmethod
    def identity(cls, n: int) -> "Correspondence":
        return cls(tuple((i, i) for i in range(n)), n, n)

    @classmethod
    def from_maps(cls, f, g) -> "Correspondence":
        """Graph of ``f: X -> Y`` together with the transposed graph of ``g: Y -> X``."""
        f, g = list(f), list(g)
        pairs = [(i, int(f[i])) for i in range(len(f))]
        pairs += [(int(g[j]), j) for j in range(len(g))]
        return cls(tuple(pairs), len(f), len(g))


@dataclass(frozen=True)
class GHResult:
    """Outcome of an exact search.

    ``exact`` is False only when a node budget stopped the search; then
    ``lower <= d_GH <= upper`` and ``distance`` equals ``upper``.
    """

    distance: float
    witness: Correspondence
    node_count: int = 0
    exact: bool = True
    lower: float = field(default=math.nan)
    upper: float = field(default=math.nan)

    def __post_init__(self):
        if math.isnan(self.lower):
            object.__setattr__(self, "lower", self.distance)
        if math.isnan(self.upper):
            object.__setattr__(self, "upper", self.distance)

    def to_dict(self) -> dict:
        return {
            "distance": self.distance,
            "exact": self.exact,
            "lower": self.lower,
            "upper": self.upper,
            "node_count": self.node_count,
            "witness": self.witness.to_dict(),
        }


def _check_sides(rel: Relation, X: FiniteMetricSpace, Y: FiniteMetricSpace):
    if rel.nx != X.n or rel.ny != Y.n:
        raise ValueError(
            f"relation sides {rel.nx}x{rel.ny} do not match spaces {X.n}x{Y.n}"
        )


def distortion(rel: Relation, X: FiniteMetricSpace, Y: FiniteMetricSpace) -> float:
    """``max | |xx'| - |yy'| |`` over all pairs of pairs in ``rel``."""
    _check_sides(rel, X, Y)
    idx = np.array(rel.pairs, dtype=int)
    xs, ys = idx[:, 0], idx[:, 1]
    dx = X.d[np.ix_(xs, xs)]
    dy = Y.d[np.ix_(ys, ys)]
    return float(np.abs(dx - dy).max())


def pair_cost_matrix(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> np.ndarray:
    """``C[p, q]`` for grid cells ``p = x*ny + y``: the discrepancy of the two pairs."""
    n, m = X.n, Y.n
    c = np.abs(X.d[:, None, :, None] - Y.d[None, :, None, :])
    return c.reshape(n * m, n * m)


def gh_lower_bound(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> float:
    """``|diam X - diam Y| / 2``."""
    return abs(diam(X) - diam(Y)) / 2


def gh_upper_bound(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> float:
    """``max(diam X, diam Y) / 2``, the distortion of the full product relation halved."""
    return max(diam(X), diam(Y)) / 2


# --- brute force ---------------------------------------------------------


def _grid_masks(nx: int, ny: int):
    k = nx * ny
    masks = np.arange(1 << k, dtype=np.int64)
    row_ok = np.ones(masks.shape, dtype=bool)
    for i in range(nx):
        row_bits = sum(1 << (i * ny + j) for j in range(ny))
        row_ok &= (masks & row_bits) != 0
    for j in range(ny):
        col_bits = sum(1 << (i * ny + j) for i in range(nx))
        row_ok &= (masks & col_bits) != 0
    return masks, row_ok


def _check_budget(nx: int, ny: int, budget: int):
    if nx * ny > budget:
        raise BudgetExceeded(f"{nx}x{ny} grid exceeds enumeration budget {budget}")


def _mask_to_correspondence(mask: int, nx: int, ny: int) -> Correspondence:
    pairs = [(c // ny, c % ny) for c in range(nx * ny) if mask >> c & 1]
    return Correspondence(tuple(pairs), nx, ny)


def enumerate_correspondences(
    nx: int, ny: int, budget: int = ENUMERATION_BUDGET
) -> Iterator[Correspondence]:
    """Every correspondence of the ``nx x ny`` grid, once each.

    Cell ``(i, j)`` is bit ``i*ny + j``; subsets come out in increasing
    bitmask order.
    """
    _check_budget(nx, ny, budget)
    masks, ok = _grid_masks(nx, ny)
    for mask in masks[ok]:
        yield _mask_to_correspondence(int(mask), nx, ny)


def _all_distortions(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> np.ndarray:
    """Distortion of every subset of the grid, indexed by bitmask (empty set -> 0)."""
    k = X.n * Y.n
    cost = pair_cost_matrix(X, Y)
    dis = np.zeros(1 << k)
    for b in range(k):
        lo = 1 << b
        # worst discrepancy between cell b and any cell of a lower-bit mask
        inc = np.zeros(lo)
        for c in range(b):
            step = 1 << c
            inc[step : 2 * step] = np.maximum(inc[:step], cost[c, b])
        dis[lo : 2 * lo] = np.maximum(dis[:lo], inc)
    return dis


def gh_exact_bruteforce(
    X: FiniteMetricSpace, Y: FiniteMetricSpace, budget: int = ENUMERATION_BUDGET
) -> GHResult:
    """Half the least distortion over all correspondences.

    The witness is the first minimizer in :func:`enumerate_correspondences`
    order.
    """
    _check_budget(X.n, Y.n, budget)
    masks, ok = _grid_masks(X.n, Y.n)
    dis = _all_distortions(X, Y)
    cand = np.where(ok, dis, np.inf)
    best = int(np.argmin(cand))
    return GHResult(
        distance=float(cand[best]) / 2,
        witness=_mask_to_correspondence(best, X.n, Y.n),
        node_count=int(ok.sum()),
    )


def optimal_correspondences_bruteforce(
    X: FiniteMetricSpace, Y: FiniteMetricSpace, budget: int = ENUMERATION_BUDGET
) -> list[Correspondence]:
    """All correspondences attaining the minimum distortion, in enumeration order."""
    _check_budget(X.n, Y.n, budget)
    masks, ok = _grid_masks(X.n, Y.n)
    dis = _all_distortions(X, Y)
    cand = np.where(ok, dis, np.inf)
    best = cand.min()
    return [_mask_to_correspondence(int(m), X.n, Y.n) for m in np.flatnonzero(cand == best)]


def function_pair_subcorrespondence(R: Correspondence) -> Correspondence:
    """A sub-correspondence of ``R`` generated by a pair of maps.

    Takes the smallest partner on each side: ``f(x) = min R(x)``,
    ``g(y) = min R^-1(y)``.
    """
    f = [min(R.image(i)) for i in range(R.nx)]
    g = [min(R.preimage(j)) for j in range(R.ny)]
    return Correspondence.from_maps(f, g)


# --- branch and bound ----------------------------------------------------


def _eccentricity_order(d: np.ndarray) -> list[int]:
    ecc = d.max(axis=1)
    return sorted(range(d.shape[0]), key=lambda i: (-ecc[i], i))


class _Search:
    """Depth-first search over ``f`` then the uncovered part of ``g``.

    ``cur[p]`` holds the worst discrepancy between grid cell ``p`` and the
    cells chosen so far, so adding ``p`` raises the distortion to
    ``max(dist, cur[p])``. Unchosen variables contribute the bound
    ``min cur`` over their row or column.
    """

    def __init__(self, X, Y, node_budget):
        self.n, self.m = X.n, Y.n
        self.cost = pair_cost_matrix(X, Y)
        self.xorder = _eccentricity_order(X.d)
        self.yorder = _eccentricity_order(Y.d)
        self.node_budget = node_budget
        self.nodes = 0
        self.best = math.inf
        self.best_pairs: list[int] = []
        self.aborted = False
        self.open_bound = math.inf

    def greedy(self):
        n, m = self.n, self.m
        cur = np.zeros(n * m)
        covered = np.zeros(m, dtype=bool)
        dist = 0.0
        chosen = []
        for x in self.xorder:
            row = cur[x * m : (x + 1) * m]
            y = int(np.lexsort((np.arange(m), row))[0])
            p = x * m + y
            dist = max(dist, row[y])
            chosen.append(p)
            covered[y] = True
            cur = np.maximum(cur, self.cost[p])
        for y in self.yorder:
            if covered[y]:
                continue
            col = cur[y::m]
            x = int(np.lexsort((np.arange(n), col))[0])
            p = x * m + y
            dist = max(dist, col[x])
            chosen.append(p)
            cur = np.maximum(cur, self.cost[p])
        return float(dist), chosen

    def bound(self, depth, cur, dist, covered) -> float:
        n, m = self.n, self.m
        grid = cur.reshape(n, m)
        lb = dist
        rest = self.xorder[depth:]
        if rest:
            lb = max(lb, float(grid[rest].min(axis=1).max()))
        open_cols = ~covered
        if open_cols.any():
            lb = max(lb, float(grid[:, open_cols].min(axis=0).max()))
        return lb

    def run(self, depth, cur, dist, covered, chosen):
        if self.aborted:
            return
        self.nodes += 1
        lb = self.bound(depth, cur, dist, covered)
        if lb >= self.best:
            return
        if self.node_budget is not None and self.nodes > self.node_budget:
            self.aborted = True
            self.open_bound = min(self.open_bound, lb)
            return
        n, m = self.n, self.m
        if depth < n:
            x = self.xorder[depth]
            vals = cur[x * m : (x + 1) * m]
            cells = [(vals[y], y, x * m + y) for y in range(m)]
            target_y = None
        else:
            target_y = next((y for y in self.yorder if not covered[y]), None)
            if target_y is None:
                self.best = dist
                self.best_pairs = list(chosen)
                return
            vals = cur[target_y::m]
            cells = [(vals[x], x, x * m + target_y) for x in range(n)]
        cells.sort()
        for val, _, p in cells:
            if val >= self.best:
                break
            if self.aborted:
                # the remaining siblings are still bounded below by this node
                self.open_bound = min(self.open_bound, lb)
                return
            new_cov = covered
            if target_y is None:
                y = p % m
                if not covered[y]:
                    new_cov = covered.copy()
                    new_cov[y] = True
            else:
                new_cov = covered.copy()
                new_cov[target_y] = True
            chosen.append(p)
            self.run(
                depth + 1,
                np.maximum(cur, self.cost[p]),
                max(dist, float(val)),
                new_cov,
                chosen,
            )
            chosen.pop()


def _cells_to_correspondence(cells, n, m) -> Correspondence:
    return Correspondence(tuple((p // m, p % m) for p in cells), n, m)


def greedy_correspondence(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> Correspondence:
    """Correspondence built by taking the cheapest partner for each point in turn."""
    s = _Search(X, Y, None)
    _, cells = s.greedy()
    return _cells_to_correspondence(cells, X.n, Y.n)


def gh_exact(
    X: FiniteMetricSpace,
    Y: FiniteMetricSpace,
    node_budget: int | None = None,
) -> GHResult:
    """Exact Gromov-Hausdorff distance with an optimal correspondence.

    Branch-and-bound over map pairs, seeded with the greedy correspondence.
    X-side points are assigned in decreasing eccentricity order, candidates in
    increasing incremental distortion; the search is deterministic.

    With ``node_budget`` the search may stop early, returning the best
    correspondence found and a certified interval ``[lower, upper]``.
    """
    s = _Search(X, Y, node_budget)
    s.best, s.best_pairs = s.greedy()
    start_cells = list(s.best_pairs)
    n, m = X.n, Y.n
    s.run(0, np.zeros(n * m), 0.0, np.zeros(m, dtype=bool), [])
    witness = _cells_to_correspondence(s.best_pairs or start_cells, n, m)
    upper = s.best / 2
    if s.aborted:
        lower = max(gh_lower_bound(X, Y), min(s.open_bound, s.best) / 2)
        return GHResult(upper, witness, s.nodes, exact=False, lower=lower, upper=upper)
    return GHResult(upper, witness, s.nodes)
