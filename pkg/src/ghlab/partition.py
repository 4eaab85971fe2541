"""Canonical partitions of spaces close to a general-position space, and
blockwise splitting of optimal correspondences between two such spaces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metric import FiniteMetricSpace, e_value, is_general_position, s_value
from .solver import Correspondence, distortion, gh_exact

__all__ = [
    "PreconditionError",
    "CrossingPairError",
    "Partition",
    "PropertyReport",
    "SplitCorrespondence",
    "partition_from_correspondence",
    "canonical_partition",
    "verify_partition",
    "split_correspondence",
    "split_by_partitions",
    "renumbering_equivalence",
]


class PreconditionError(ValueError):
    """Inputs outside the range where the partition results apply.

    ``kind`` is one of ``general-position``, ``eps-range``, ``too-far``,
    ``too-small``, ``not-optimal``, ``not-partition``.
    """

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


class CrossingPairError(RuntimeError):
    def __init__(self, pair: tuple[int, int], labels: tuple[int, int]):
        x, y = pair
        super().__init__(
            f"pair ({x},{y}) joins X-block {labels[0]} to Y-block {labels[1]}"
        )
        self.pair = pair
        self.labels = labels


@dataclass(frozen=True)
class Partition:
    """``labels[x]`` is the point of the reference space whose block holds ``x``."""

    labels: tuple[int, ...]
    n_blocks: int

    def __post_init__(self):
        labels = tuple(int(v) for v in self.labels)
        object.__setattr__(self, "labels", labels)
        if any(not 0 <= v < self.n_blocks for v in labels):
            raise ValueError("label outside the reference space")
        used = set(labels)
        if len(used) != self.n_blocks:
            empty = min(set(range(self.n_blocks)) - used)
            raise ValueError(f"block {empty} is empty")

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n_blocks)]
        for x, v in enumerate(self.labels):
            out[v].append(x)
        return tuple(tuple(b) for b in out)

    def relabel(self, perm) -> "Partition":
        """New partition with block ``i`` renamed ``perm[i]``."""
        return Partition(tuple(perm[v] for v in self.labels), self.n_blocks)

    def to_dict(self) -> dict:
        return {"labels": list(self.labels)}

    @classmethod
    def from_dict(cls, data: dict, n_blocks: int | None = None) -> "Partition":
        labels = data["labels"]
        return cls(tuple(labels), n_blocks if n_blocks is not None else max(labels) + 1)


def partition_from_correspondence(R: Correspondence) -> Partition:
    """Blocks ``R(i)`` for the points ``i`` of the reference (X) side of ``R``.

    Raises :class:`PreconditionError` when two images overlap.
    """
    labels = [-1] * R.ny
    for i, x in R.pairs:
        if labels[x] not in (-1, i):
            raise PreconditionError(
                "not-partition", f"point {x} lies in both R({labels[x]}) and R({i})"
            )
        labels[x] = i
    return Partition(tuple(labels), R.nx)


def _check_center(M: FiniteMetricSpace):
    if not is_general_position(M):
        raise PreconditionError("general-position", "reference space is not in general position")


def canonical_partition(M: FiniteMetricSpace, X: FiniteMetricSpace, eps: float) -> Partition:
    _check_center(M)
    s = s_value(M)
    if not 0 < eps <= s / 2:
        raise PreconditionError("eps-range", f"eps = {eps} outside (0, s(M)/2 = {s / 2}]")
    res = gh_exact(M, X)
    if not 2 * res.distance < eps:
        raise PreconditionError(
            "too-far", f"2 d_GH(M, X) = {2 * res.distance} is not below eps = {eps}"
        )
    return partition_from_correspondence(res.witness)


@dataclass(frozen=True)
class PropertyReport:
    """Both partition properties with their worst cases.

    Margins are ``eps`` minus the worst value; a property holds iff its
    margin is positive.
    """

    eps: float
    diam_margin: float
    diam_witness: tuple | None  # (label, x, x')
    discrepancy_margin: float
    discrepancy_witness: tuple | None  # (x, x', label(x), label(x'))

    @property
    def diam_ok(self) -> bool:
        return self.diam_margin > 0

    @property
    def discrepancy_ok(self) -> bool:
        return self.discrepancy_margin > 0

    @property
    def ok(self) -> bool:
        return self.diam_ok and self.discrepancy_ok

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "diam_ok": self.diam_ok,
            "diam_margin": self.diam_margin,
            "diam_witness": self.diam_witness,
            "discrepancy_ok": self.discrepancy_ok,
            "discrepancy_margin": self.discrepancy_margin,
            "discrepancy_witness": self.discrepancy_witness,
        }


def verify_partition(
    M: FiniteMetricSpace, X: FiniteMetricSpace, eps: float, P: Partition
) -> PropertyReport:
    if len(P.labels) != X.n:
        raise ValueError("partition does not cover X")
    lab = np.array(P.labels)
    same = lab[:, None] == lab[None, :]

    within = np.where(same, X.d, -np.inf)
    a, b = np.unravel_index(int(np.argmax(within)), within.shape)
    worst_diam = float(within[a, b])
    diam_witness = (int(lab[a]), int(a), int(b)) if worst_diam > 0 else None

    gap = np.abs(X.d - M.d[np.ix_(lab, lab)])
    c, d = np.unravel_index(int(np.argmax(gap)), gap.shape)
    worst_gap = float(gap[c, d])
    gap_witness = (int(c), int(d), int(lab[c]), int(lab[d])) if worst_gap > 0 else None

    return PropertyReport(eps, eps - worst_diam, diam_witness, eps - worst_gap, gap_witness)


@dataclass(frozen=True)
class SplitCorrespondence:
    """``parts[i]`` holds the pairs of the parent correspondence inside block ``i``."""

    parts: tuple[tuple[tuple[int, int], ...], ...]
    x_partition: Partition
    y_partition: Partition

    def block(self, i: int) -> Correspondence:
        """Part ``i`` as a correspondence between the blocks, in block-local indices."""
        xs = self.x_partition.blocks[i]
        ys = self.y_partition.blocks[i]
        xi = {x: k for k, x in enumerate(xs)}
        yi = {y: k for k, y in enumerate(ys)}
        return Correspondence(tuple((xi[x], yi[y]) for x, y in self.parts[i]), len(xs), len(ys))

    def union(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(p for part in self.parts for p in part))


def split_by_partitions(R: Correspondence, PX: Partition, PY: Partition) -> SplitCorrespondence:
    """Restrict ``R`` to the blocks ``X_i x Y_i``; a pair across blocks raises."""
    if PX.n_blocks != PY.n_blocks:
        raise ValueError("partitions have different numbers of blocks")
    parts: list[list[tuple[int, int]]] = [[] for _ in range(PX.n_blocks)]
    for x, y in R.pairs:
        i, j = PX.labels[x], PY.labels[y]
        if i != j:
            raise CrossingPairError((x, y), (i, j))
        parts[i].append((x, y))
    split = SplitCorrespondence(tuple(tuple(p) for p in parts), PX, PY)
    for i in range(PX.n_blocks):
        split.block(i)  # raises if a block is not covered on both sides
    return split


def split_correspondence(
    M: FiniteMetricSpace,
    X: FiniteMetricSpace,
    Y: FiniteMetricSpace,
    eps: float,
    R: Correspondence,
) -> SplitCorrespondence:
    """Split an optimal correspondence between ``X`` and ``Y`` along canonical partitions."""
    _check_center(M)
    if M.n < 3:
        raise PreconditionError("too-small", f"reference space has {M.n} < 3 points")
    bound = min(s_value(M), e_value(M)) / 4
    if not 0 < eps <= bound:
        raise PreconditionError(
            "eps-range", f"eps = {eps} outside (0, min(s, e)/4 = {bound}]"
        )
    PX = canonical_partition(M, X, eps)
    PY = canonical_partition(M, Y, eps)
    if distortion(R, X, Y) / 2 != gh_exact(X, Y).distance:
        raise PreconditionError("not-optimal", "correspondence is not optimal for (X, Y)")
    return split_by_partitions(R, PX, PY)


def renumbering_equivalence(P1: Partition, P2: Partition) -> bool:
    """True iff some relabeling carries the blocks of ``P1`` onto those of ``P2``."""
    if len(P1.labels) != len(P2.labels):
        raise ValueError("partitions cover different sets")
    return set(P1.blocks) == set(P2.blocks)
