"""Weighted harmonic representatives of integer 1-cocycles.

Given an integer cocycle ``eta`` on ``R_{2 alpha}``, find the vertex function
``tau`` minimizing ``sum_e w_e (eta + d tau)_e ** 2`` and set
``theta = eta + d tau``. Among minimizers ``tau`` is the one of least
vertex-weighted norm, i.e. it has vertex-weighted mean zero on every connected
component. This is ``tau = -d^+ eta`` for the weighted Moore-Penrose inverse.

Two solvers are provided:

``iterative``
    Column-scaled LSQR on the matrix-free operator ``W^(1/2) d``, followed by
    the mean-zero projection.
``dense-svd``
    Explicit weighted pseudoinverse from an SVD; the reference for small
    complexes.

Vertex weights only select which ``tau`` is reported; ``theta`` does not
depend on them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import ConvergenceError

TAPERED = "paper"
UNIFORM = "uniform"


@dataclass(frozen=True)
class WeightScheme:
    """Vertex weights and the edge weighting rule.

    ``edge_rule="paper"`` weighs edge ``{l, l'}`` of ``R_eps`` by
    ``|eps - d(l, l')|_+`` with ``eps`` the complex's threshold; ``"uniform"``
    uses 1 on every edge. ``vertex_weights=None`` means all ones.
    """

    vertex_weights: np.ndarray = None
    edge_rule: str = TAPERED

    def __post_init__(self):
        if self.edge_rule not in (TAPERED, UNIFORM):
            raise ValueError(f"unknown edge weight rule {self.edge_rule!r}")
        if self.vertex_weights is not None:
            w = np.asarray(self.vertex_weights, dtype=np.float64)
            if np.any(~np.isfinite(w)) or np.any(w <= 0):
                raise ValueError("vertex weights must be positive")

    def edge_weights(self, filt, eps=None):
        if self.edge_rule == UNIFORM:
            return np.ones(filt.n_edges)
        eps = filt.threshold if eps is None else eps
        return np.maximum(eps - filt.edge_diameters, 0.0)

    def vertex_weights_for(self, filt):
        if self.vertex_weights is None:
            return np.ones(filt.n_vertices)
        w = np.asarray(self.vertex_weights, dtype=np.float64)
        if w.shape != (filt.n_vertices,):
            raise ValueError("one vertex weight per landmark required")
        return w


@dataclass(frozen=True)
class HarmonicPair:
    """Result of :func:`harmonic_smooth`.

    ``theta`` is aligned with ``filt.edges``; ``residual`` is the achieved
    objective ``sum w theta**2``; ``normal_residual`` is the relative
    optimality defect of ``theta`` (see :func:`normal_equations_residual`).
    """

    tau: np.ndarray
    theta: np.ndarray
    residual: float
    normal_residual: float
    iterations: int
    solver: str


def coboundary_apply(tau, filt):
    """Edge cochain ``(d tau)(i, j) = tau(j) - tau(i)`` over ``filt.edges``."""
    tau = np.asarray(tau)
    return tau[filt.edges[:, 1]] - tau[filt.edges[:, 0]]


def coboundary_transpose_apply(g, filt):
    """Vertex cochain ``d^T g``."""
    out = np.zeros(filt.n_vertices, dtype=np.result_type(g, np.float64))
    np.add.at(out, filt.edges[:, 1], g)
    np.subtract.at(out, filt.edges[:, 0], g)
    return out


def normal_equations_residual(theta, filt, edge_weights, eta=None):
    """``max |d^T W theta| / max (|d|^T W (|theta| + |eta|))``; zero for an exact minimizer.

    The denominator is the magnitude of the terms that cancel in each vertex
    sum. Including ``eta`` keeps the ratio meaningful when ``theta`` itself
    is close to zero, as for an exact coboundary.
    """
    g = edge_weights * theta
    num = np.max(np.abs(coboundary_transpose_apply(g, filt)), initial=0.0)
    mag = np.abs(g) if eta is None else np.abs(g) + edge_weights * np.abs(eta)
    scale = np.zeros(filt.n_vertices)
    np.add.at(scale, filt.edges[:, 1], mag)
    np.add.at(scale, filt.edges[:, 0], mag)
    den = np.max(scale, initial=0.0)
    return float(num / den) if den > 0 else 0.0


def center_per_component(tau, filt, vertex_weights):
    """Subtract the vertex-weighted mean of ``tau`` on each component of ``filt``."""
    ncomp, labels = connected_components(filt.vertex_coboundary.T @ filt.vertex_coboundary,
                                         directed=False)
    wsum = np.bincount(labels, weights=vertex_weights, minlength=ncomp)
    mean = np.bincount(labels, weights=vertex_weights * tau, minlength=ncomp) / wsum
    return tau - mean[labels]


def lsqr(matvec, rmatvec, b, n, atol=1e-10, btol=1e-10, maxiter=None):
    """Least squares ``min ||A x - b||`` by the Paige-Saunders LSQR iteration.

    ``A`` is given through ``matvec(x) = A x`` and ``rmatvec(y) = A^T y``.
    Stops when ``||A^T r|| <= atol ||A|| ||r||`` (least-squares optimality) or
    ``||r|| <= btol ||b|| + atol ||A|| ||x||`` (compatible system), with
    ``||A||`` the running Frobenius-norm estimate.

    Returns
    -------
    x, iterations, relative_residual
        ``relative_residual`` is the value of the first stopping test.

    Raises
    ------
    ConvergenceError
        When ``maxiter`` iterations pass without meeting either test.
    """
    maxiter = 2 * n if maxiter is None else maxiter
    x = np.zeros(n)
    beta = np.linalg.norm(b)
    if beta == 0:
        return x, 0, 0.0
    u = b / beta
    v = rmatvec(u)
    alpha = np.linalg.norm(v)
    if alpha == 0:
        return x, 0, 0.0
    v = v / alpha
    w = v.copy()
    phibar, rhobar = beta, alpha
    anorm2 = 0.0
    xnorm = 0.0
    ratio = np.inf
    for it in range(1, maxiter + 1):
        u = matvec(v) - alpha * u
        beta = np.linalg.norm(u)
        if beta > 0:
            u /= beta
        anorm2 += alpha * alpha + beta * beta
        v = rmatvec(u) - beta * v
        alpha = np.linalg.norm(v)
        if alpha > 0:
            v /= alpha

        rho = np.hypot(rhobar, beta)
        c, s = rhobar / rho, beta / rho
        theta = s * alpha
        rhobar = -c * alpha
        phi = c * phibar
        phibar = s * phibar

        x += (phi / rho) * w
        w = v - (theta / rho) * w
        xnorm = np.linalg.norm(x)

        anorm = np.sqrt(anorm2)
        rnorm = phibar
        arnorm = phibar * alpha * abs(c)
        ratio = arnorm / (anorm * rnorm) if rnorm > 0 else 0.0
        if rnorm <= btol * np.linalg.norm(b) + atol * anorm * xnorm:
            return x, it, ratio
        if ratio <= atol:
            return x, it, ratio
    raise ConvergenceError(
        f"LSQR did not converge in {maxiter} iterations "
        f"(relative normal-equation residual {ratio:.3e})",
        relative_residual=float(ratio), iterations=maxiter)


def _solve_iterative(eta, filt, w, tol, maxiter):
    sw = np.sqrt(w)
    # Jacobi column scaling: column v of W^(1/2) d has squared norm sum of incident weights
    colnorm = np.zeros(filt.n_vertices)
    np.add.at(colnorm, filt.edges[:, 0], w)
    np.add.at(colnorm, filt.edges[:, 1], w)
    colnorm = np.sqrt(colnorm)
    scale = np.where(colnorm > 0, 1.0 / np.where(colnorm > 0, colnorm, 1.0), 0.0)

    def matvec(y):
        return sw * coboundary_apply(scale * y, filt)

    def rmatvec(r):
        return scale * coboundary_transpose_apply(sw * r, filt)

    if maxiter is None:
        maxiter = 10 * (filt.n_vertices + filt.n_edges)
    y, its, _ = lsqr(matvec, rmatvec, -sw * eta, filt.n_vertices,
                     atol=tol, btol=tol, maxiter=maxiter)
    return scale * y, its


def _solve_dense(eta, filt, w, vw):
    d = filt.vertex_coboundary.toarray().astype(np.float64)
    A = np.sqrt(w)[:, None] * d / np.sqrt(vw)[None, :]
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    cutoff = max(A.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    keep = s > cutoff
    rhs = np.sqrt(w) * eta
    y = -(Vt[keep].T @ ((U[:, keep].T @ rhs) / s[keep]))
    return y / np.sqrt(vw)


def harmonic_smooth(eta, filt_2alpha, weights=None, solver="iterative", tol=1e-10,
                    maxiter=None) -> HarmonicPair:
    """Weighted harmonic representative ``theta`` and potential ``tau`` of ``eta``.

    Parameters
    ----------
    eta : IntegerCochain or array_like
        Integer cocycle; arrays are taken as aligned with ``filt_2alpha.edges``.
    filt_2alpha : RipsFiltration
        The complex ``R_{2 alpha}``; its threshold is the ``eps`` of the
        default tapered edge weights.
    weights : WeightScheme, optional
    solver : {"iterative", "dense-svd"}
    tol : float
        LSQR relative tolerance (iterative solver only).
    maxiter : int, optional
        LSQR iteration cap, default ``10 * (N + E)``.
    """
    weights = WeightScheme() if weights is None else weights
    if hasattr(eta, "vector"):
        eta = eta.vector(filt_2alpha)
    eta = np.asarray(eta, dtype=np.float64)
    if eta.shape != (filt_2alpha.n_edges,):
        raise ValueError("eta must have one value per edge of the complex")
    w = weights.edge_weights(filt_2alpha)
    vw = weights.vertex_weights_for(filt_2alpha)
    if filt_2alpha.n_edges and np.any(w <= 0):
        raise ValueError("edge weights must be positive on every edge of the complex")

    if filt_2alpha.n_edges == 0:
        tau, its = np.zeros(filt_2alpha.n_vertices), 0
    elif solver == "iterative":
        tau, its = _solve_iterative(eta, filt_2alpha, w, tol, maxiter)
    elif solver == "dense-svd":
        tau, its = _solve_dense(eta, filt_2alpha, w, vw), 0
    else:
        raise ValueError(f"unknown solver {solver!r}")
    tau = center_per_component(tau, filt_2alpha, vw)
    theta = eta + coboundary_apply(tau, filt_2alpha)
    return HarmonicPair(
        tau=tau,
        theta=theta,
        residual=float(np.sum(w * theta ** 2)),
        normal_residual=normal_equations_residual(theta, filt_2alpha, w, eta),
        iterations=int(its),
        solver=solver,
    )
