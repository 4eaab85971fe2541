"""End-to-end checks of the three ball-convexity results on concrete instances."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .geodesic import evaluate, make_geodesic, uniform_grid
from .intervals import theorem2_report
from .metric import (
    FiniteMetricSpace,
    MetricError,
    diam,
    e_value,
    gh_to_point,
    is_general_position,
    random_general_position,
    s_value,
    validate,
)
from .partition import (
    CrossingPairError,
    PreconditionError,
    canonical_partition,
    split_by_partitions,
)
from .solver import Correspondence, distortion, gh_exact

__all__ = [
    "TheoremReport",
    "verify_theorem1",
    "verify_theorem2",
    "verify_theorem3",
    "theorem3_radius",
    "perturbed_space",
    "boundary_pair",
    "theorem1_instance",
    "theorem3_instance",
    "campaign",
]

# relative gap kept between generated perturbations and the ball boundary
INTERIOR_MARGIN = 1e-6


@dataclass
class TheoremReport:
    theorem: int
    params: dict
    samples: list = field(default_factory=list)
    passed: bool = True
    worst_margin: float = math.inf
    seed: int | None = None
    notes: list = field(default_factory=list)

    def record(self, ok: bool, margin: float, **sample):
        sample["ok"] = bool(ok)
        sample["margin"] = margin
        self.samples.append(sample)
        self.passed = self.passed and bool(ok)
        self.worst_margin = min(self.worst_margin, margin)

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "params": self.params,
            "samples": self.samples,
            "pass": self.passed,
            "worst_margin": self.worst_margin,
            "seed": self.seed,
            "version": __version__,
            "notes": self.notes,
        }


# --- theorem 1 ------------------------------------------------------------


def verify_theorem1(
    X: FiniteMetricSpace, Y: FiniteMetricSpace, r: float, t_grid: int = 33, seed=None
) -> TheoremReport:
    """Geodesic between two members of the ball of radius ``r`` about the point.

    At every grid ``t`` checks ``diam R_t <= max(diam X, diam Y)`` and
    ``d_GH(point, R_t) = diam(R_t)/2 <= r`` with exact float comparisons.
    """
    dx, dy = diam(X), diam(Y)
    if not (dx <= 2 * r and dy <= 2 * r):
        raise PreconditionError(
            "too-far", f"diameters {dx}, {dy} exceed 2r = {2 * r}; a space lies outside the ball"
        )
    curve = make_geodesic(X, Y)
    cap = max(dx, dy)
    rep = TheoremReport(1, {"r": r, "t_grid": t_grid, "n": X.n, "m": Y.n, "gh": curve.gh}, seed=seed)
    for t in uniform_grid(t_grid):
        Rt = evaluate(curve, float(t))
        d = diam(Rt)
        to_point = gh_to_point(Rt)
        ok = d <= cap and to_point <= r
        rep.record(ok, r - to_point, t=float(t), diam=d, gh_to_point=to_point, bound=r)
    return rep


def theorem1_instance(seed: int, n: int, m: int | None = None):
    """Two random spaces and the smallest radius whose ball holds both."""
    ss = np.random.SeedSequence(seed)
    a, b = (int(c.generate_state(1)[0]) for c in ss.spawn(2))
    X = random_general_position(n, a)
    Y = random_general_position(m if m is not None else n, b, scale=1.5)
    r = max(diam(X), diam(Y)) / 2
    return X, Y, r


# --- theorem 2 ------------------------------------------------------------


def verify_theorem2(r=1, grids=(11,), seed=None) -> TheoremReport:
    """The curve ``s -> C_s([0,2r], {0,2r})`` is shortest yet leaves the ball.

    Passes iff, on every grid, ``diam C_{r/2} = 3r`` exactly, the Hausdorff
    lengths add up to ``r`` exactly, every sample is in ``s``-position, the
    midpoint is at distance ``3r/2 > r`` from the point, and the
    discretization lower bounds on ``d_GH(A, B)`` stay below ``r``.
    """
    rq = Fraction(r)
    rep = TheoremReport(2, {"r": float(rq), "grids": list(grids)}, seed=seed)
    for grid in grids:
        cr = theorem2_report(rq, grid)
        lowers = [lb for *_, lb in cr.gh_lower_bounds]
        lower_ok = all(lb <= float(rq) for lb in lowers) and lowers == sorted(lowers)
        ok = (
            cr.midpoint_diam == 3 * rq
            and cr.additivity_sum == cr.hausdorff_ab == rq
            and cr.geodesic_ok()
            and cr.midpoint_gh_to_point > rq
            and lower_ok
        )
        rep.record(
            ok,
            float(cr.violation_margin),
            grid=grid,
            d_H=float(cr.hausdorff_ab),
            diam_mid=float(cr.midpoint_diam),
            gh_mid_to_point=float(cr.midpoint_gh_to_point),
            additivity_sum=float(cr.additivity_sum),
            gh_lower_bounds=lowers,
            curve=[
                {"s": float(s), "d_H(c_s,A)": float(da), "d_H(c_s,B)": float(db), "diam": float(dm)}
                for s, da, db, dm in cr.samples
            ],
        )
    return rep


# --- theorem 3 ------------------------------------------------------------


def theorem3_radius(M: FiniteMetricSpace) -> float:
    return min(s_value(M), e_value(M)) / 4


def _check_center(M: FiniteMetricSpace) -> float:
    if M.n < 3:
        raise PreconditionError("too-small", f"center has {M.n} < 3 points")
    if not is_general_position(M):
        raise PreconditionError("general-position", "center is not in general position")
    return theorem3_radius(M)


def verify_theorem3(
    M: FiniteMetricSpace,
    X: FiniteMetricSpace,
    Y: FiniteMetricSpace,
    t_grid: int = 33,
    seed=None,
) -> TheoremReport:
    """Geodesic between two members of the small ball about ``M`` stays in it.

    At each grid ``t`` the blockwise correspondence ``R'`` between ``M`` and
    ``R_t`` gives the bound ``dis(R')/2``; it must lie in ``[d_GH(M, R_t), r]``.
    Instances with ``d_GH(M, .) = r`` exactly are flagged as boundary cases and
    only the exact distance is checked for them.
    """
    r = _check_center(M)
    eps = 2 * r
    gx = gh_exact(M, X).distance
    gy = gh_exact(M, Y).distance
    if gx > r or gy > r:
        raise PreconditionError(
            "too-far", f"d_GH(M,X) = {gx}, d_GH(M,Y) = {gy} exceed r = {r}"
        )
    boundary = not (2 * gx < eps and 2 * gy < eps)
    rep = TheoremReport(
        3,
        {"r": r, "eps": eps, "t_grid": t_grid, "n": M.n, "nx": X.n, "ny": Y.n,
         "gh_MX": gx, "gh_MY": gy, "boundary": boundary},
        seed=seed,
    )
    curve = make_geodesic(X, Y)
    split = None
    if boundary:
        rep.notes.append("boundary instance: partition bound not applicable")
    else:
        PX = canonical_partition(M, X, eps)
        PY = canonical_partition(M, Y, eps)
        try:
            split = split_by_partitions(curve.R, PX, PY)
        except CrossingPairError as exc:
            rep.passed = False
            rep.notes.append(f"optimal correspondence crosses blocks: {exc}")
            return rep

    for t in uniform_grid(t_grid):
        t = float(t)
        Rt = evaluate(curve, t)
        exact = gh_exact(M, Rt).distance
        sample = {"t": t, "gh_exact": exact, "bound": r}
        if split is None:
            rep.record(exact <= r, r - exact, **sample)
            continue
        Rp = _blockwise_correspondence(curve.R, split, t)
        analytic = distortion(Rp, M, Rt) / 2
        ok = exact <= analytic <= r
        rep.record(ok, r - analytic, analytic=analytic, **sample)
    return rep


def _blockwise_correspondence(R: Correspondence, split, t: float) -> Correspondence:
    """``R' = U {i} x R_i`` as a correspondence between ``M`` and ``R_t``."""
    PX, PY = split.x_partition, split.y_partition
    if t == 0.0:
        pairs = [(i, x) for x, i in enumerate(PX.labels)]
        return Correspondence(tuple(pairs), PX.n_blocks, len(PX.labels))
    if t == 1.0:
        pairs = [(i, y) for y, i in enumerate(PY.labels)]
        return Correspondence(tuple(pairs), PY.n_blocks, len(PY.labels))
    pos = {p: k for k, p in enumerate(R.pairs)}
    pairs = [(i, pos[p]) for i, part in enumerate(split.parts) for p in part]
    return Correspondence(tuple(pairs), PX.n_blocks, len(R.pairs))


def perturbed_space(
    M: FiniteMetricSpace,
    rng: np.random.Generator,
    amplitude: float,
    max_extra: int = 2,
    retries: int = 200,
) -> FiniteMetricSpace:
    """A space whose natural correspondence to ``M`` has distortion below ``amplitude``.

    Each point of ``M`` becomes a cluster of points with planar offsets; the
    distance between points of clusters ``i != j`` is a jittered ``|ij|`` plus
    the offset distance. Jitter and cluster spread share the amplitude.
    """
    n = M.n
    for _ in range(retries):
        share = rng.uniform(0.2, 0.8)
        jitter = share * amplitude
        spread = (1 - share) * amplitude
        noise = rng.uniform(-jitter, jitter, size=(n, n)) * 0.999
        noise = np.triu(noise, 1)
        base = M.d + noise + noise.T
        extra = rng.integers(0, max_extra + 1)
        owners = list(range(n)) + list(rng.integers(0, n, size=extra))
        # offsets inside a disc of diameter < spread
        radius = rng.uniform(0, 0.499 * spread, size=len(owners))
        angle = rng.uniform(0, 2 * np.pi, size=len(owners))
        off = np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=1)
        own = np.array(owners)
        d = base[np.ix_(own, own)] + np.sqrt(((off[:, None] - off[None]) ** 2).sum(-1))
        np.fill_diagonal(d, 0.0)
        try:
            return validate(d)
        except MetricError:
            continue
    raise RuntimeError("could not build a perturbed metric; amplitude too large for M")


def theorem3_instance(seed: int, n: int):
    """Center ``M`` in general position and two spaces strictly inside its small ball."""
    ss = np.random.SeedSequence(seed)
    c_m, c_x = ss.spawn(2)
    M = random_general_position(n, int(c_m.generate_state(1)[0]), min_sep=0.05)
    r = theorem3_radius(M)
    rng = np.random.default_rng(c_x)
    out = []
    for _ in range(2):
        # natural correspondence distortion stays below 2r, so d_GH(M, .) < r
        amp = 2 * r * rng.uniform(0.3, 1.0) * (1 - INTERIOR_MARGIN)
        out.append(perturbed_space(M, rng, amp))
    return M, out[0], out[1]


def boundary_pair(M: FiniteMetricSpace, fraction: float = 1 - INTERIOR_MARGIN):
    """Two copies of ``M``, each with one distance moved by ``fraction * 2r``.

    Their distances to ``M`` sit just inside the ball radius.
    """
    r = theorem3_radius(M)
    delta = 2 * r * fraction
    iu = list(zip(*np.triu_indices(M.n, 1)))
    found = []
    for i, j in iu:
        for sign in (1.0, -1.0):
            d = M.d.copy()
            d[i, j] += sign * delta
            d[j, i] = d[i, j]
            try:
                found.append(validate(d))
            except MetricError:
                continue
            break
        if len(found) == 2:
            return found[0], found[1]
    raise RuntimeError("no admissible boundary perturbation")


# --- campaign -------------------------------------------------------------


def _trial(args):
    seed, k, size, t_grid = args
    ss = np.random.SeedSequence([seed, k])
    s1, s2, s3 = (int(c.generate_state(1)[0]) for c in ss.spawn(3))
    rng = np.random.default_rng(s2)

    X, Y, r = theorem1_instance(s1, size, int(rng.integers(1, size + 1)))
    t1 = verify_theorem1(X, Y, r, t_grid, seed=s1)

    r2 = Fraction(int(rng.integers(1, 9)), 4)
    t2 = verify_theorem2(r2, (11,), seed=s2)

    M, X3, Y3 = theorem3_instance(s3, max(3, size))
    t3 = verify_theorem3(M, X3, Y3, t_grid, seed=s3)
    return k, [t1, t2, t3]


def campaign(
    seed: int, trials: int, sizes=(3, 4), t_grid: int = 33, workers: int | None = None
) -> dict:
    """Run every theorem check on ``trials`` seeded instances.

    Trial ``k`` uses size ``sizes[k % len(sizes)]`` (at least 3 for the
    general-position center) and derives all randomness from ``(seed, k)``,
    so the summary does not depend on ``workers``.
    """
    sizes = list(sizes)
    jobs = [(seed, k, sizes[k % len(sizes)], t_grid) for k in range(trials)]
    if workers is None:
        workers = int(os.environ.get("GHLAB_THREADS", "1") or 1)
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_trial, jobs))
    else:
        results = [_trial(j) for j in jobs]
    results.sort(key=lambda kv: kv[0])

    summary = {"seed": seed, "trials": trials, "sizes": sizes, "t_grid": t_grid,
               "version": __version__, "theorems": {}}
    failures = []
    for idx in range(3):
        reps = [res[idx] for _, res in results]
        passed = sum(rep.passed for rep in reps)
        summary["theorems"][str(idx + 1)] = {
            "passed": passed,
            "total": len(reps),
            "pass_rate": passed / len(reps) if reps else 1.0,
            "worst_margin": min((rep.worst_margin for rep in reps), default=math.inf),
        }
        failures += [
            {"theorem": idx + 1, "trial": k, "seed": res[idx].seed}
            for k, res in results
            if not res[idx].passed
        ]
    summary["failures"] = failures
    summary["pass"] = not failures
    return summary
