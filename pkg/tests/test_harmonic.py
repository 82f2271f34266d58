import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from circlet.errors import ConvergenceError
from circlet.filtration import build_rips
from circlet.harmonic import (WeightScheme, center_per_component, coboundary_apply,
                              coboundary_transpose_apply, harmonic_smooth, lsqr,
                              normal_equations_residual)
from oracles import dense_harmonic, random_metric

UNIFORM = WeightScheme(edge_rule="uniform")


def line_filtration(xs, thr):
    xs = np.asarray(xs, dtype=float)
    return build_rips(np.abs(xs[:, None] - xs[None, :]), thr)


def test_constant_tau_is_closed(hexagon_D):
    f = build_rips(hexagon_D, 2.1)
    assert not np.any(coboundary_apply(np.full(6, 3.5), f))


def test_indicator_sign():
    f = line_filtration([0, 1], 2)
    assert coboundary_apply(np.array([1.0, 0.0]), f).tolist() == [-1.0]


def test_path_graph():
    f = line_filtration([0, 1, 3], 2.5)
    assert f.edges.tolist() == [[0, 1], [1, 2]]
    assert coboundary_apply(np.array([0.0, 1.0, 3.0]), f).tolist() == [1.0, 2.0]


def test_transpose_is_adjoint(hexagon_D):
    f = build_rips(hexagon_D, 2.1)
    rng = np.random.default_rng(0)
    tau, g = rng.normal(size=f.n_vertices), rng.normal(size=f.n_edges)
    assert coboundary_apply(tau, f) @ g == pytest.approx(tau @ coboundary_transpose_apply(g, f))


@pytest.mark.parametrize("solver", ["iterative", "dense-svd"])
def test_four_cycle(square_D, solver):
    f = build_rips(square_D, 1.2)
    eta = np.array([1.0 if tuple(e) == (0, 1) else 0.0 for e in f.edges.tolist()])
    hp = harmonic_smooth(eta, f, UNIFORM, solver=solver)
    around = {(0, 1): 1, (1, 2): 1, (2, 3): 1, (0, 3): -1}
    expected = np.array([0.25 * around[tuple(e)] for e in f.edges.tolist()])
    _, oracle_theta = dense_harmonic(eta, 4, f.edges.tolist(), np.ones(4))
    assert np.allclose(oracle_theta, expected, atol=1e-12)
    assert np.allclose(hp.theta, expected, atol=1e-10)
    assert hp.residual == pytest.approx(0.25, abs=1e-10)


def test_harmonic_input_unchanged(square_D):
    f = build_rips(square_D, 1.2)
    around = {(0, 1): 1, (1, 2): 1, (2, 3): 1, (0, 3): -1}
    eta = np.array([0.25 * around[tuple(e)] for e in f.edges.tolist()])
    hp = harmonic_smooth(eta, f, UNIFORM)
    assert np.allclose(hp.tau, 0, atol=1e-12)
    assert np.allclose(hp.theta, eta, atol=1e-12)


@pytest.mark.parametrize("solver", ["iterative", "dense-svd"])
def test_coboundary_is_annihilated(hexagon_D, solver):
    f = build_rips(hexagon_D, 1.5)
    sigma = np.array([0, 2, -1, 5, 3, 1], dtype=float)
    hp = harmonic_smooth(coboundary_apply(sigma, f), f, solver=solver)
    assert np.allclose(hp.theta, 0, atol=1e-9)
    assert np.allclose(hp.tau, -(sigma - sigma.mean()), atol=1e-9)


def test_tapered_weights_positive_inside_threshold(hexagon_D):
    f = build_rips(hexagon_D, 1.8)
    w = WeightScheme().edge_weights(f)
    assert np.all(w > 0)
    assert np.allclose(w, 1.8 - f.edge_diameters)


def test_vertex_weights_shape_checked(hexagon_D):
    f = build_rips(hexagon_D, 1.8)
    with pytest.raises(ValueError):
        harmonic_smooth(np.zeros(f.n_edges), f, WeightScheme(vertex_weights=np.ones(3)))
    with pytest.raises(ValueError):
        WeightScheme(vertex_weights=np.array([1.0, -1.0]))


def test_iteration_cap_raises(hexagon_D):
    f = build_rips(hexagon_D, 1.8)
    eta = np.arange(f.n_edges, dtype=float)
    with pytest.raises(ConvergenceError) as info:
        harmonic_smooth(eta, f, maxiter=1)
    assert info.value.iterations == 1


def test_lsqr_solves_small_system():
    rng = np.random.default_rng(2)
    A = rng.normal(size=(30, 8))
    b = rng.normal(size=30)
    x, its, _ = lsqr(lambda v: A @ v, lambda r: A.T @ r, b, 8, atol=1e-12, btol=1e-12)
    assert np.allclose(x, np.linalg.lstsq(A, b, rcond=None)[0], atol=1e-9)


def test_disconnected_components_centered_separately():
    f = line_filtration([0, 1, 10, 11], 2)
    tau = center_per_component(np.array([1.0, 3.0, 10.0, 20.0]), f, np.ones(4))
    assert tau.tolist() == [-1.0, 1.0, -5.0, 5.0]


@given(st.integers(0, 100_000), st.integers(4, 14), st.floats(0.4, 1.0),
       st.sampled_from(["paper", "uniform"]), st.booleans())
@settings(max_examples=60, deadline=None)
def test_solvers_agree_with_oracle(seed, n, frac, rule, vweights):
    rng = np.random.default_rng(seed)
    D = random_metric(rng, n, "euclidean")
    f = build_rips(D, float(D.max()) * frac)
    if f.n_edges == 0:
        return
    eta = rng.integers(-3, 4, size=f.n_edges).astype(float)
    vw = rng.uniform(0.5, 2.0, size=n) if vweights else None
    scheme = WeightScheme(vertex_weights=vw, edge_rule=rule)
    w = scheme.edge_weights(f)
    _, theta_ref = dense_harmonic(eta, n, f.edges.tolist(), w)
    it = harmonic_smooth(eta, f, scheme, solver="iterative", tol=1e-12)
    ds = harmonic_smooth(eta, f, scheme, solver="dense-svd")
    scale = max(1.0, np.abs(eta).max())
    for hp in (it, ds):
        assert np.allclose(hp.theta, theta_ref, atol=1e-8 * scale)
        assert np.allclose(hp.theta - eta, coboundary_apply(hp.tau, f), atol=1e-12 * scale)
        assert normal_equations_residual(hp.theta, f, w, eta) <= 1e-8
        assert hp.normal_residual <= 1e-8
        assert np.allclose(center_per_component(hp.tau, f, scheme.vertex_weights_for(f)),
                           hp.tau, atol=1e-9 * scale)
    assert np.allclose(it.tau, ds.tau, atol=1e-8 * scale)
