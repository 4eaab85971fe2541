import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ghlab.metric import (
    GenerationError,
    MetricError,
    diam,
    e_value,
    gh_to_point,
    is_general_position,
    point_space,
    random_general_position,
    s_value,
    validate,
)

from conftest import integer_metric, triangle, two_points


def brute_s(X):
    vals = [X.d[i, j] for i in range(X.n) for j in range(X.n) if i != j]
    return min(vals) if vals else math.inf


def brute_e(X):
    pairs = list(combinations(range(X.n), 2))
    gaps = [
        abs(X.d[p] - X.d[q]) for p in pairs for q in pairs if set(p) != set(q)
    ]
    return min(gaps) if gaps else math.inf


def test_validate_point_and_pair():
    assert validate([[0]]).n == 1
    X = validate([[0, 1], [1, 0]])
    assert X.n == 2 and diam(X) == 1


def test_validate_triangle_violation_reports_witness():
    with pytest.raises(MetricError) as info:
        validate([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    assert info.value.axiom == "triangle"
    assert info.value.indices == (0, 2, 1)


@pytest.mark.parametrize(
    "matrix, axiom",
    [
        ([[0, 1], [2, 0]], "symmetry"),
        ([[1, 1], [1, 0]], "zero-diagonal"),
        ([[0, 0], [0, 0]], "positivity"),
        ([[0, -1], [-1, 0]], "positivity"),
        ([[0, 1, 2]], "square"),
    ],
)
def test_validate_axioms(matrix, axiom):
    with pytest.raises(MetricError) as info:
        validate(matrix)
    assert info.value.axiom == axiom


def test_validate_tolerance():
    bad = [[0, 1, 2.001], [1, 0, 1], [2.001, 1, 0]]
    with pytest.raises(MetricError):
        validate(bad)
    assert validate(bad, tol=0.01).n == 3


def test_scalar_examples(m346):
    P = point_space()
    assert diam(P) == 0 and s_value(P) == math.inf and e_value(P) == math.inf
    assert gh_to_point(P) == 0
    X = two_points(2)
    assert diam(X) == 2 and s_value(X) == 2 and gh_to_point(X) == 1
    assert e_value(two_points(5)) == math.inf
    assert diam(m346) == 6 and s_value(m346) == 3 and e_value(m346) == 1
    assert gh_to_point(m346) == 3


def test_general_position_examples(m346):
    assert is_general_position(m346)
    assert not is_general_position(triangle(3, 3, 5))
    assert not is_general_position(triangle(1, 2, 3))
    assert e_value(triangle(3, 3, 5)) == 0


def test_random_general_position_examples():
    assert random_general_position(1, 123, 1, 0.1).n == 1
    X = random_general_position(3, 7, 10, 0.05)
    validate(X.d)
    assert is_general_position(X)
    assert s_value(X) >= 0.5 and e_value(X) >= 0.5
    a = random_general_position(4, 7, 10, 0.05)
    b = random_general_position(4, 7, 10, 0.05)
    assert np.array_equal(a.d, b.d)


def test_random_general_position_tight_params_use_fallback():
    X = random_general_position(7, 3, 2.0, 0.04)
    assert is_general_position(X)
    assert e_value(X) >= 0.08 and s_value(X) >= 0.08


def test_random_general_position_fails_loudly():
    with pytest.raises(GenerationError):
        random_general_position(6, 0, 1.0, 0.5, retries=20)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 7), seed=st.integers(0, 10_000), integer=st.booleans())
def test_diagnostics_match_brute_force(n, seed, integer):
    X = integer_metric(n, seed) if integer else random_general_position(n, seed)
    validate(X.d)
    assert s_value(X) == brute_s(X)
    assert e_value(X) == brute_e(X)
    assert gh_to_point(X) == diam(X) / 2
    strict = all(
        X.d[i, k] < X.d[i, j] + X.d[j, k]
        for i, j, k in combinations(range(n), 3)
        for i, j, k in [(i, j, k), (j, i, k), (i, k, j)]
    )
    assert is_general_position(X) == ((e_value(X) > 0 or n <= 2) and strict)


def test_space_is_immutable(m346):
    with pytest.raises(ValueError):
        m346.d[0, 1] = 9
