from fractions import Fraction as F

import numpy as np
import pytest

from ghlab.harness import (
    boundary_pair,
    campaign,
    perturbed_space,
    theorem1_instance,
    theorem3_instance,
    theorem3_radius,
    verify_theorem1,
    verify_theorem2,
    verify_theorem3,
)
from ghlab.metric import diam, point_space, random_general_position
from ghlab.partition import PreconditionError
from ghlab.solver import gh_exact

from conftest import triangle


def test_theorem1_point_pair():
    rep = verify_theorem1(point_space(), point_space(), 0.7)
    assert rep.passed and rep.worst_margin == 0.7


@pytest.mark.parametrize("seed", range(5))
def test_theorem1_random(seed):
    X, Y, r = theorem1_instance(seed, 4)
    rep = verify_theorem1(X, Y, r)
    assert rep.passed and rep.worst_margin >= 0
    assert len(rep.samples) == 33


def test_theorem1_against_point():
    X = random_general_position(5, 2)
    r = diam(X) / 2
    rep = verify_theorem1(X, point_space(), r)
    assert rep.passed
    for s in rep.samples:
        assert s["diam"] == pytest.approx((1 - s["t"]) * diam(X), abs=1e-12)


def test_theorem1_precondition():
    with pytest.raises(PreconditionError):
        verify_theorem1(random_general_position(4, 1), point_space(), 0.01)


def test_theorem2_values():
    rep = verify_theorem2(1)
    assert rep.passed and rep.worst_margin == 0.5
    s = rep.samples[0]
    assert s["diam_mid"] == 3 and s["gh_mid_to_point"] == 1.5 and s["additivity_sum"] == 1


def test_theorem2_scaling_and_grid_independence():
    small = verify_theorem2(F(1, 4))
    assert small.passed and small.worst_margin == 0.125
    assert small.samples[0]["diam_mid"] == 0.75
    coarse, fine = verify_theorem2(1, (11,)), verify_theorem2(1, (101,))
    assert coarse.passed == fine.passed
    assert coarse.worst_margin == fine.worst_margin
    assert coarse.samples[0]["diam_mid"] == fine.samples[0]["diam_mid"]


def test_theorem3_identical_spaces(m346):
    rep = verify_theorem3(m346, m346, m346)
    assert rep.passed
    assert all(s["gh_exact"] == 0 for s in rep.samples)


def test_theorem3_small_perturbations(m346):
    assert theorem3_radius(m346) == 0.25
    rng = np.random.default_rng(0)
    X = perturbed_space(m346, rng, 0.45)
    Y = perturbed_space(m346, rng, 0.3)
    rep = verify_theorem3(m346, X, Y)
    assert rep.passed
    assert all(s["gh_exact"] <= s["analytic"] <= 0.25 for s in rep.samples)


def test_theorem3_boundary_margin(m346):
    X, Y = boundary_pair(m346)
    rep = verify_theorem3(m346, X, Y)
    assert rep.passed
    assert 0 <= rep.worst_margin < 0.02


def test_theorem3_preconditions(m346):
    with pytest.raises(PreconditionError) as info:
        verify_theorem3(triangle(3, 3, 5), m346, m346)
    assert info.value.kind == "general-position"
    far = triangle(3.6, 4, 6)
    with pytest.raises(PreconditionError) as info:
        verify_theorem3(m346, far, m346)
    assert info.value.kind == "too-far"
    M2 = random_general_position(2, 0)
    with pytest.raises(PreconditionError) as info:
        verify_theorem3(M2, M2, M2)
    assert info.value.kind == "too-small"


def test_closed_ball_boundary_is_flagged(m346):
    # a distance moved by exactly 2r puts X on the sphere of radius r
    d = m346.d.copy()
    d[0, 1] = d[1, 0] = 3.5
    from ghlab.metric import validate

    X = validate(d)
    assert gh_exact(m346, X).distance == 0.25
    rep = verify_theorem3(m346, X, m346)
    assert rep.params["boundary"]
    assert rep.passed


@pytest.mark.parametrize("seed", range(6))
def test_theorem3_generated(seed):
    M, X, Y = theorem3_instance(seed, 3 + seed % 3)
    r = theorem3_radius(M)
    assert gh_exact(M, X).distance < r and gh_exact(M, Y).distance < r
    assert verify_theorem3(M, X, Y, t_grid=9).passed


def test_campaign_smoke_and_determinism():
    a = campaign(7, 1, (2,))
    assert a["pass"]
    assert all(v["total"] == 1 for v in a["theorems"].values())
    assert campaign(7, 1, (2,)) == a


def test_campaign_workers_do_not_change_summary():
    assert campaign(3, 4, (3, 4), t_grid=9, workers=1) == campaign(3, 4, (3, 4), t_grid=9, workers=2)


def test_full_campaign():
    summary = campaign(7, 100, (3, 4))
    assert summary["pass"]
    assert all(v["pass_rate"] == 1.0 for v in summary["theorems"].values())
