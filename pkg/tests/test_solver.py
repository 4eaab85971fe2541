from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ghlab.metric import diam, point_space, random_general_position
from ghlab.solver import (
    BudgetExceeded,
    Correspondence,
    Relation,
    distortion,
    enumerate_correspondences,
    function_pair_subcorrespondence,
    gh_exact,
    gh_exact_bruteforce,
    gh_lower_bound,
    gh_upper_bound,
    greedy_correspondence,
    optimal_correspondences_bruteforce,
)

from conftest import integer_metric, triangle, two_points


def all_grid_correspondences(nx, ny):
    """Independent enumeration: every subset of the grid, filtered for surjectivity."""
    cells = list(product(range(nx), range(ny)))
    out = []
    for bits in product((0, 1), repeat=len(cells)):
        chosen = [c for c, b in zip(cells, bits) if b]
        if {i for i, _ in chosen} == set(range(nx)) and {j for _, j in chosen} == set(range(ny)):
            out.append(frozenset(chosen))
    return out


def naive_distortion(pairs, X, Y):
    return max(abs(X.d[x, x2] - Y.d[y, y2]) for x, y in pairs for x2, y2 in pairs)


def random_pair(k):
    rng = np.random.default_rng(k)
    n, m = (int(v) for v in rng.integers(1, 5, size=2))
    if k % 2:
        return integer_metric(n, 3 * k), integer_metric(m, 3 * k + 1)
    return random_general_position(n, 3 * k), random_general_position(m, 3 * k + 1, scale=1.3)


def test_relation_invariants():
    with pytest.raises(ValueError):
        Relation((), 1, 1)
    with pytest.raises(ValueError):
        Relation(((0, 2),), 1, 2)
    with pytest.raises(ValueError):
        Correspondence(((0, 0),), 2, 1)
    with pytest.raises(ValueError):
        Correspondence(((0, 0), (1, 0)), 2, 2)
    R = Correspondence(((1, 0), (0, 1), (1, 0)), 2, 2)
    assert R.pairs == ((0, 1), (1, 0))
    assert R.image(1) == [0] and R.preimage(1) == [0]
    assert Correspondence.from_dict(R.to_dict()) == R


def test_distortion_examples(m346):
    assert distortion(Correspondence.identity(3), m346, m346) == 0
    R = Correspondence(((0, 0), (1, 0)), 2, 1)
    assert distortion(R, two_points(2), point_space()) == 2
    Y = triangle(3.1, 3.9, 6.05)
    assert distortion(Correspondence.identity(3), m346, Y) == pytest.approx(0.1, abs=1e-12)
    assert distortion(Relation(((0, 0),), 3, 3), m346, Y) == 0
    with pytest.raises(ValueError):
        distortion(R, m346, Y)


def test_enumeration_counts():
    assert len(list(enumerate_correspondences(1, 1))) == 1
    assert len(list(enumerate_correspondences(2, 1))) == 1
    # 16 subsets of the 2x2 grid; 7 cover both rows and both columns
    assert len(all_grid_correspondences(2, 2)) == 7
    assert len(list(enumerate_correspondences(2, 2))) == 7


@pytest.mark.parametrize("nx, ny", [(1, 3), (2, 3), (3, 3), (3, 2)])
def test_enumeration_matches_independent_oracle(nx, ny):
    got = [frozenset(R.pairs) for R in enumerate_correspondences(nx, ny)]
    assert len(got) == len(set(got))
    assert set(got) == set(all_grid_correspondences(nx, ny))


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded):
        next(enumerate_correspondences(5, 5))
    with pytest.raises(BudgetExceeded):
        gh_exact_bruteforce(random_general_position(5, 0), random_general_position(5, 1))


def test_bruteforce_examples(m346):
    res = gh_exact_bruteforce(m346, m346)
    assert res.distance == 0
    assert set(Correspondence.identity(3).pairs) <= set(res.witness.pairs)
    assert gh_exact_bruteforce(two_points(2), point_space()).distance == 1
    assert gh_exact_bruteforce(two_points(2), two_points(4)).distance == 1


@pytest.mark.parametrize("k", range(12))
def test_bruteforce_matches_naive_minimum(k):
    X, Y = random_pair(k)
    if X.n * Y.n > 9:
        X, Y = X.subspace(range(min(X.n, 3))), Y.subspace(range(min(Y.n, 3)))
    naive = min(naive_distortion(c, X, Y) for c in all_grid_correspondences(X.n, Y.n))
    res = gh_exact_bruteforce(X, Y)
    assert res.distance == naive / 2
    assert distortion(res.witness, X, Y) == naive
    # witness is the first minimizer in enumeration order
    first = next(R for R in enumerate_correspondences(X.n, Y.n) if distortion(R, X, Y) == naive)
    assert res.witness == first


def test_gh_exact_examples():
    for n in range(1, 8):
        X = random_general_position(n, n)
        assert gh_exact(X, X).distance == 0
        assert gh_exact(X, point_space()).distance == diam(X) / 2
    assert gh_exact(two_points(2), two_points(4)).distance == 1


@pytest.mark.parametrize("k", range(60))
def test_gh_exact_matches_bruteforce(k):
    X, Y = random_pair(k)
    fast, slow = gh_exact(X, Y), gh_exact_bruteforce(X, Y)
    assert fast.exact
    assert fast.distance == slow.distance
    assert distortion(fast.witness, X, Y) == 2 * fast.distance


def test_gh_exact_is_deterministic_and_symmetric():
    X, Y = random_general_position(6, 1), random_general_position(5, 2)
    a, b = gh_exact(X, Y), gh_exact(X, Y)
    assert a.witness == b.witness and a.node_count == b.node_count
    assert gh_exact(Y, X).distance == a.distance


def test_node_budget_gives_certified_interval():
    X, Y = integer_metric(9, 2), integer_metric(9, 101)
    full = gh_exact(X, Y)
    cut = gh_exact(X, Y, node_budget=3)
    assert not cut.exact
    assert cut.lower <= full.distance <= cut.upper
    assert distortion(cut.witness, X, Y) == 2 * cut.upper


def test_bounds(m346):
    assert gh_lower_bound(m346, m346) == 0
    assert gh_lower_bound(two_points(2), two_points(4)) == 1
    X = random_general_position(5, 9)
    assert gh_lower_bound(X, point_space()) == gh_exact(X, point_space()).distance
    assert gh_upper_bound(X, point_space()) == diam(X) / 2


def test_greedy_is_a_correspondence_and_an_upper_bound():
    X, Y = random_general_position(6, 4), random_general_position(4, 5)
    R = greedy_correspondence(X, Y)
    assert isinstance(R, Correspondence)
    assert distortion(R, X, Y) / 2 >= gh_exact(X, Y).distance


def spaces_pool():
    pool = [point_space(), two_points(1.0), triangle(3, 4, 6), triangle(1, 1, 1)]
    pool += [random_general_position(n, 40 + n) for n in (2, 3, 4)]
    pool += [integer_metric(4, 7), integer_metric(3, 8)]
    return pool


def test_triangle_inequality_on_pool():
    pool = spaces_pool()
    g = [[gh_exact(a, b).distance for b in pool] for a in pool]
    k = len(pool)
    for i in range(k):
        assert g[i][i] == 0
        for j in range(k):
            assert g[i][j] == g[j][i]
            for l in range(k):
                assert g[i][l] <= g[i][j] + g[j][l] + 1e-12


def test_bracketing_bounds_on_pool():
    pool = spaces_pool()
    for a in pool:
        for b in pool:
            d = gh_exact(a, b).distance
            assert gh_lower_bound(a, b) <= d <= gh_upper_bound(a, b)


@settings(max_examples=80, deadline=None)
@given(
    nx=st.integers(1, 4),
    ny=st.integers(1, 4),
    seed=st.integers(0, 2**31),
    data=st.data(),
)
def test_function_pair_reduction_and_upper_bound(nx, ny, seed, data):
    X = random_general_position(nx, seed)
    Y = integer_metric(ny, seed)
    cells = list(product(range(nx), range(ny)))
    chosen = data.draw(st.sets(st.sampled_from(cells), min_size=1))
    # complete to a correspondence
    rng = np.random.default_rng(seed)
    for i in range(nx):
        if all(c[0] != i for c in chosen):
            chosen.add((i, int(rng.integers(ny))))
    for j in range(ny):
        if all(c[1] != j for c in chosen):
            chosen.add((int(rng.integers(nx)), j))
    R = Correspondence(tuple(chosen), nx, ny)
    sub = function_pair_subcorrespondence(R)
    assert set(sub.pairs) <= set(R.pairs)
    assert distortion(sub, X, Y) <= distortion(R, X, Y)
    assert gh_exact(X, Y).distance <= distortion(R, X, Y) / 2


def test_all_optimal_correspondences_attain_minimum(m346):
    Y = triangle(3.1, 3.9, 6.05)
    best = gh_exact(m346, Y).distance
    opts = optimal_correspondences_bruteforce(m346, Y)
    assert opts and all(distortion(R, m346, Y) == 2 * best for R in opts)
