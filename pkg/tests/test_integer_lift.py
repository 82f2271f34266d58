import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from circlet.cohomology import cochain_vector, diagram, persistent_cohomology, \
    representative_at_scale
from circlet.errors import LiftFailureError
from circlet.filtration import build_rips, restrict
from circlet.integer_lift import centered_residue, integer_coboundary, lift_cocycle


@pytest.mark.parametrize("value,expected", [(12, -1), (6, 6), (7, -6), (0, 0), (1, 1)])
def test_centered_residue_q13(value, expected):
    assert centered_residue(value, 13) == expected


@given(st.integers(-10**6, 10**6), st.sampled_from([3, 5, 7, 13, 47, 991]))
def test_centered_residue_range_and_class(v, q):
    r = int(centered_residue(v, q))
    assert -(q - 1) // 2 <= r <= (q - 1) // 2
    assert (r - v) % q == 0


def test_zero_cochain_lifts_to_zero(hexagon_D):
    f = build_rips(hexagon_D, 2.1)
    eta = lift_cocycle({}, f, 13)
    assert not np.any(eta.vector(f))


def test_hexagon_lift_without_triangles(hexagon_D):
    f = build_rips(hexagon_D, 2.1)
    (p,) = diagram(persistent_cohomology(f, 47), 1)
    sub = restrict(f, 1.5)
    eta_q = representative_at_scale(p, f, 1.5)
    eta = lift_cocycle(eta_q, sub, 47)
    assert np.array_equal(eta.vector(sub) % 47, cochain_vector(eta_q, sub) % 47)
    assert eta.value(1, 0) == -eta.value(0, 1)


def test_lift_failure_detected():
    D = np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]], dtype=float)
    f = build_rips(D, 2.0)
    # cocycle mod 3 whose centered lift has coboundary 3
    eta_q = {(0, 1): 1, (1, 2): 1, (0, 2): 2}
    with pytest.raises(LiftFailureError) as info:
        lift_cocycle(eta_q, f, 3)
    assert info.value.q == 3 and info.value.bad_triangles == [(0, 1, 2)]


def test_lift_round_trip_on_random_cocycles():
    rng = np.random.default_rng(5)
    P = rng.normal(size=(12, 2))
    D = np.sqrt(((P[:, None] - P[None]) ** 2).sum(-1))
    f = build_rips(D, float(np.median(D)))
    for _ in range(20):
        tau = rng.integers(-3, 4, size=f.n_vertices)
        vec = (f.vertex_coboundary @ tau) % 47
        eta_q = {tuple(e): int(v) for e, v in zip(f.edges.tolist(), vec) if v}
        eta = lift_cocycle(eta_q, f, 47)
        assert np.array_equal(eta.vector(f) % 47, vec)
        assert not np.any(integer_coboundary(eta.vector(f), f))
