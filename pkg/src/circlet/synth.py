"""Seeded synthetic data: noisy circle, flat torus in C^2, Klein bottle.

All generators draw from :class:`circlet._rng.PortableRNG`, so output depends
only on the arguments.

The Klein bottle is ``S^1 x S^1 / (z, w) ~ (-z, conj(w))``. Its metric is the
quotient of the chordal metric of the torus embedded in C^2 by that
involution: ``d([p], [p']) = min(|p - p'|, |p - g(p')|)``. The involution is
an isometry of C^2, so this is a metric on the quotient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._rng import PortableRNG
from .metric_io import DistanceSource

SHAPES = ("circle", "torus", "klein")


@dataclass(frozen=True)
class SynthSpec:
    shape: str
    n: int
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown shape {self.shape!r}; expected one of {SHAPES}")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")


@dataclass(frozen=True, eq=False)
class SynthData:
    """A generated data set plus its generating parameters.

    ``params`` holds one row per point: the angle ``t`` for the circle,
    ``(phi1, phi2)`` for the torus and ``(a, b)`` (fundamental domain
    ``[0, pi) x [0, 2 pi)``) for the Klein bottle.
    """

    source: DistanceSource
    params: np.ndarray
    spec: SynthSpec = field(repr=False, default=None)


def gen_noisy_circle(n, sigma=0.1, seed=0) -> SynthData:
    """Points ``(1 + e_i)(cos t_i, sin t_i)``, ``t_i`` uniform, ``e_i ~ N(0, sigma^2)``."""
    spec = SynthSpec("circle", int(n), float(sigma), int(seed))
    rng = PortableRNG(seed)
    t = rng.uniform(n, 0.0, 2.0 * np.pi)
    radius = 1.0 + rng.normal(n, sigma)
    pts = np.column_stack([radius * np.cos(t), radius * np.sin(t)])
    return SynthData(DistanceSource.from_points(pts), t, spec)


def torus_embedding(phi):
    """``(phi1, phi2) -> (cos phi1, sin phi1, cos phi2, sin phi2)``."""
    phi = np.atleast_2d(phi)
    return np.column_stack([np.cos(phi[:, 0]), np.sin(phi[:, 0]),
                            np.cos(phi[:, 1]), np.sin(phi[:, 1])])


def gen_torus(n, seed=0) -> SynthData:
    """Uniform angles on ``[0, 2 pi)^2`` embedded in C^2 = R^4."""
    spec = SynthSpec("torus", int(n), 0.0, int(seed))
    phi = PortableRNG(seed).uniform(2 * n, 0.0, 2.0 * np.pi).reshape(n, 2)
    return SynthData(DistanceSource.from_points(torus_embedding(phi)), phi, spec)


def klein_involution(params):
    """``(a, b) -> (a + pi, -b)``: the map ``(z, w) -> (-z, conj(w))`` on angles."""
    p = np.atleast_2d(params)
    return np.column_stack([p[:, 0] + np.pi, -p[:, 1]])


def _chord2(u, v):
    return 4.0 * np.sin(0.5 * (u - v)) ** 2


def klein_distances(P, Q):
    """Quotient-metric distances between parameter rows of ``P`` and ``Q``."""
    P, Q = np.atleast_2d(P), np.atleast_2d(Q)
    Pa, Pb = P[:, 0][:, None], P[:, 1][:, None]
    Qa, Qb = Q[:, 0][None, :], Q[:, 1][None, :]
    direct = _chord2(Pa, Qa) + _chord2(Pb, Qb)
    flipped = _chord2(Pa, Qa + np.pi) + _chord2(Pb, -Qb)
    return np.sqrt(np.minimum(direct, flipped))


def gen_klein(n, seed=0) -> SynthData:
    """Uniform points on the fundamental domain, as an explicit distance matrix."""
    spec = SynthSpec("klein", int(n), 0.0, int(seed))
    u = PortableRNG(seed).uniform(2 * n).reshape(n, 2)
    params = np.column_stack([np.pi * u[:, 0], 2.0 * np.pi * u[:, 1]])
    D = klein_distances(params, params)
    D = np.triu(D, 1)
    return SynthData(DistanceSource.from_matrix(D + D.T), params, spec)


def generate(spec: SynthSpec) -> SynthData:
    if spec.shape == "circle":
        return gen_noisy_circle(spec.n, spec.noise_sigma, spec.seed)
    if spec.shape == "torus":
        return gen_torus(spec.n, spec.seed)
    return gen_klein(spec.n, spec.seed)
