import math

import numpy as np
import pytest

from circlet.synth import (SynthSpec, gen_klein, gen_noisy_circle, gen_torus, generate,
                           klein_distances, klein_involution, torus_embedding)


def test_noiseless_circle_is_on_unit_circle():
    P = gen_noisy_circle(4, 0.0, seed=11).source.points
    assert P.shape == (4, 2)
    assert np.allclose(np.hypot(P[:, 0], P[:, 1]), 1.0, atol=1e-15)


@pytest.mark.parametrize("shape", ["circle", "torus", "klein"])
def test_seeded(shape):
    a = generate(SynthSpec(shape, 50, 0.1, 4))
    b = generate(SynthSpec(shape, 50, 0.1, 4))
    c = generate(SynthSpec(shape, 50, 0.1, 5))
    assert np.array_equal(a.params, b.params)
    assert not np.array_equal(a.params, c.params)


def test_circle_radii_bounded():
    P = gen_noisy_circle(1000, 0.1, seed=0).source.points
    r = np.hypot(P[:, 0], P[:, 1])
    assert np.all((0.3 < r) & (r < 1.7))
    assert abs(r.std() - 0.1) < 0.02


def test_circle_angles_uniform():
    t = gen_noisy_circle(1000, 0.1, seed=0).params
    assert np.all((0 <= t) & (t < 2 * math.pi))
    counts = np.histogram(t, bins=8, range=(0, 2 * math.pi))[0]
    assert counts.min() > 80


def test_torus_embedding():
    data = gen_torus(200, seed=1)
    P = data.source.points
    assert np.allclose(P[:, 0] ** 2 + P[:, 1] ** 2, 1) and np.allclose(P[:, 2] ** 2 + P[:, 3] ** 2, 1)
    assert np.allclose(P, torus_embedding(data.params))


def klein_orbit(params):
    return [torus_embedding(params), torus_embedding(klein_involution(params))]


def test_klein_zero_on_orbit():
    p = np.array([[0.7, 2.1]])
    assert klein_distances(p, p)[0, 0] == 0.0
    assert klein_distances(p, klein_involution(p))[0, 0] == pytest.approx(0.0, abs=1e-7)


def test_klein_matches_four_lift_enumeration():
    rng = np.random.default_rng(8)
    P = np.column_stack([rng.uniform(0, math.pi, 200), rng.uniform(0, 2 * math.pi, 200)])
    Q = np.column_stack([rng.uniform(0, math.pi, 200), rng.uniform(0, 2 * math.pi, 200)])
    got = np.diag(klein_distances(P, Q))
    lifts = [np.linalg.norm(a - b, axis=1) for a in klein_orbit(P) for b in klein_orbit(Q)]
    assert np.allclose(got, np.min(lifts, axis=0), atol=1e-12)


def test_klein_matrix_is_a_metric():
    src = gen_klein(150, seed=2).source
    D = src.matrix
    assert np.array_equal(D, D.T) and np.all(np.diag(D) == 0)
    rng = np.random.default_rng(0)
    for a, b, c in rng.integers(0, 150, size=(1000, 3)):
        assert D[a, c] <= D[a, b] + D[b, c] + 1e-12


def test_synth_parameters_validated():
    with pytest.raises(ValueError):
        SynthSpec("sphere", 10)
    with pytest.raises(ValueError):
        SynthSpec("circle", 10, -1.0)
