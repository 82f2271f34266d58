import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from circlet.coords import (AngleAssignment, CoordinateModel, combine, evaluate, evaluate_all,
                            max_jump, partition_of_unity, turns_to_angle, winding_number,
                            wrap_angle)
from circlet.errors import NotCoveredError
from circlet.metric_io import DistanceSource
from circlet.pipeline import sparse_circular_coordinates
from circlet.synth import gen_noisy_circle


def line_model(landmark_x, alpha, tau=None, theta=None, edges=None):
    n = len(landmark_x)
    edges = np.zeros((0, 2), dtype=np.int64) if edges is None else np.asarray(edges)
    return CoordinateModel(
        landmark_indices=np.arange(n),
        alpha=alpha,
        tau=np.zeros(n) if tau is None else np.asarray(tau, dtype=float),
        edges=edges,
        theta=np.zeros(len(edges)) if theta is None else np.asarray(theta, dtype=float),
    )


def test_partition_two_thirds():
    src = DistanceSource.from_points([[0.0], [1.25], [5.0], [0.5]])
    model = line_model([0.0, 1.25, 5.0], 1.0, edges=[[0, 1]])
    phi = partition_of_unity(model, 3, src)
    assert phi.keys() == {0, 1}
    assert phi[0] == pytest.approx(2 / 3) and phi[1] == pytest.approx(1 / 3)


def test_partition_single_ball():
    src = DistanceSource.from_points([[0.0], [5.0]])
    assert partition_of_unity(line_model([0, 5], 1.0), 0, src) == {0: 1.0}


def test_partition_equidistant():
    src = DistanceSource.from_points([[0.0], [1.0], [0.5]])
    phi = partition_of_unity(line_model([0, 1], 1.0, edges=[[0, 1]]), 2, src)
    assert phi == {0: 0.5, 1: 0.5}


def test_partition_not_covered():
    src = DistanceSource.from_points([[0.0], [3.0]])
    with pytest.raises(NotCoveredError):
        partition_of_unity(line_model([0.0], 1.0), 1, src)


def test_isolated_landmark_angle_is_tau():
    src = DistanceSource.from_points([[0.0], [5.0]])
    model = line_model([0, 5], 1.0, tau=[0.3, -0.1])
    assert evaluate(model, 0, src) == pytest.approx(float(turns_to_angle(0.3)))
    assert evaluate(model, 1, src) == pytest.approx(2 * math.pi * -0.1)


def test_zero_cochains_give_zero():
    src = DistanceSource.from_points([[0.0], [1.0], [0.4], [0.7]])
    model = line_model([0.0, 1.0], 1.0, edges=[[0, 1]])
    a = evaluate_all(model, src)
    assert np.all(a.angles == 0.0)


def test_far_vector_is_marker_and_landmarks_covered():
    src = DistanceSource.from_points([[0.0], [1.0], [0.5]])
    model = line_model([0.0, 1.0], 0.8, edges=[[0, 1]], theta=[0.2])
    assert math.isnan(evaluate(model, np.array([40.0]), src))
    assert evaluate_all(model, src, np.array([0, 1])).n_markers == 0


def test_well_defined_on_circle():
    data = gen_noisy_circle(300, 0.1, seed=3)
    res = sparse_circular_coordinates(data.source, 30)
    model = res.classes[0].models[0]
    D = data.source.cross_distances(np.arange(data.source.n), model.landmark_indices)
    checked = 0
    for b in range(data.source.n):
        cover = np.flatnonzero(D[b] < model.alpha)
        ref = evaluate(model, b, data.source)
        for j in cover:
            diff = wrap_angle(evaluate(model, b, data.source, via=int(j)) - ref)
            assert abs(diff) <= 1e-9
            checked += 1
    assert checked > data.source.n


def test_via_must_cover():
    src = DistanceSource.from_points([[0.0], [3.0], [0.1]])
    model = line_model([0.0, 3.0], 1.0)
    with pytest.raises(NotCoveredError):
        evaluate(model, 2, src, via=1)


def test_combine_identity_and_sum():
    a = AngleAssignment(np.array([math.pi / 2, 0.3, np.nan]))
    assert np.array_equal(combine([a], [1]).angles[:2], a.angles[:2])
    s = combine([a, a], [1, 1])
    assert s.angles[0] == pytest.approx(math.pi)
    assert math.isnan(s.angles[2])


def test_combine_rejects_fractional_and_mismatched():
    a = AngleAssignment(np.zeros(3))
    with pytest.raises(ValueError):
        combine([a], [0.5])
    with pytest.raises(ValueError):
        combine([a, AngleAssignment(np.zeros(2))], [1, 1])


@pytest.mark.parametrize("k", [-2, -1, 0, 1, 3])
def test_winding_number_of_sampled_loops(k):
    s = np.linspace(0, 2 * math.pi, 200, endpoint=False)
    assert winding_number(wrap_angle(k * s + 0.4)) == k


def test_max_jump_ignores_wrap():
    s = np.linspace(-math.pi + 0.01, math.pi, 100)
    assert max_jump(s) == pytest.approx(s[1] - s[0])


@given(st.floats(-1e6, 1e6))
def test_turns_to_angle_range(x):
    a = float(turns_to_angle(x))
    assert -math.pi < a <= math.pi
    assert math.isclose(math.cos(a), math.cos(2 * math.pi * x), abs_tol=1e-6)
