"""Evaluation of sparse circular coordinates through a partition of unity.

For a query ``b`` covered by the ball ``B_alpha(l_j)`` the coordinate is

    2 pi (tau_j + sum_k phi_k(b) theta_jk)  (mod 2 pi)

with ``phi_k(b) = |alpha - d(l_k, b)|_+ / sum_k' |alpha - d(l_k', b)|_+``.
Integer mode uses ``tau = 0`` and the integer cocycle in place of ``theta``.
Angles are reported in ``(-pi, pi]``; uncovered queries get ``NaN``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import NotCoveredError

HARMONIC = "harmonic"
INTEGER = "integer"

_BATCH = 4096


def turns_to_angle(turns):
    """Map real turns to angles in ``(-pi, pi]``."""
    frac = np.mod(np.asarray(turns, dtype=np.float64), 1.0)
    ang = 2.0 * np.pi * frac
    return np.where(ang > np.pi, ang - 2.0 * np.pi, ang)


def wrap_angle(a):
    """Reduce angles to ``(-pi, pi]``."""
    return turns_to_angle(np.asarray(a, dtype=np.float64) / (2.0 * np.pi))


@dataclass(frozen=True, eq=False)
class CoordinateModel:
    """Everything needed to evaluate one circular coordinate.

    Attributes
    ----------
    landmark_indices : ndarray (N,)
        Data indices of the landmarks (vertex ``k`` is ``landmark_indices[k]``).
    alpha : float
        Ball radius.
    tau : ndarray (N,)
        Vertex cochain (zeros in integer mode).
    edges : ndarray (E, 2)
        Oriented edges ``(j, k)``, ``j < k``, of ``R_{2 alpha}``.
    theta : ndarray (E,)
        Edge cochain on ``edges`` (the integer cocycle in integer mode).
    mode : {"harmonic", "integer"}
    q : int
        Prime used for the persistence computation.
    class_id : str
        Which persistence class(es) the cocycle represents.
    landmark_points : ndarray (N, dim), optional
        Landmark coordinates, for point-cloud sources.
    """

    landmark_indices: np.ndarray
    alpha: float
    tau: np.ndarray
    edges: np.ndarray
    theta: np.ndarray
    mode: str = HARMONIC
    q: int = 47
    class_id: str = ""
    landmark_points: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def n_landmarks(self):
        return len(self.landmark_indices)

    @cached_property
    def theta_matrix(self):
        """Antisymmetric ``(N, N)`` array of edge values, zero off the complex."""
        N = self.n_landmarks
        M = np.zeros((N, N))
        j, k = self.edges[:, 0], self.edges[:, 1]
        M[j, k] = self.theta
        M[k, j] = -self.theta
        return M

    @cached_property
    def adjacency(self):
        N = self.n_landmarks
        A = np.eye(N, dtype=bool)
        A[self.edges[:, 0], self.edges[:, 1]] = True
        A[self.edges[:, 1], self.edges[:, 0]] = True
        return A

    @classmethod
    def from_harmonic(cls, landmarks, alpha, filt_2alpha, harmonic, q, class_id="", src=None):
        return cls(
            landmark_indices=np.asarray(landmarks.indices),
            alpha=float(alpha),
            tau=np.asarray(harmonic.tau, dtype=np.float64),
            edges=np.asarray(filt_2alpha.edges),
            theta=np.asarray(harmonic.theta, dtype=np.float64),
            mode=HARMONIC,
            q=int(q),
            class_id=str(class_id),
            landmark_points=_landmark_points(landmarks, src),
        )

    @classmethod
    def from_integer(cls, landmarks, alpha, filt_2alpha, eta, q, class_id="", src=None):
        return cls(
            landmark_indices=np.asarray(landmarks.indices),
            alpha=float(alpha),
            tau=np.zeros(filt_2alpha.n_vertices),
            edges=np.asarray(filt_2alpha.edges),
            theta=eta.vector(filt_2alpha).astype(np.float64),
            mode=INTEGER,
            q=int(q),
            class_id=str(class_id),
            landmark_points=_landmark_points(landmarks, src),
        )


def _landmark_points(landmarks, src):
    if src is None or src.points is None:
        return None
    return np.array(src.points[np.asarray(landmarks.indices)])


@dataclass(frozen=True)
class AngleAssignment:
    """Angles in ``(-pi, pi]`` per query; ``NaN`` marks a query outside every ball."""

    angles: np.ndarray

    def __len__(self):
        return len(self.angles)

    @property
    def covered(self):
        return ~np.isnan(self.angles)

    @property
    def n_markers(self):
        return int(np.count_nonzero(np.isnan(self.angles)))

    def turns(self):
        """Values in ``[0, 1)``; markers stay ``NaN``."""
        return np.mod(self.angles / (2.0 * np.pi), 1.0)


def _single_query(b):
    """One QueryPoint as a batch: an index array of length 1 or a 1-row vector block."""
    q = np.asarray(b)
    if q.ndim == 0:
        return np.array([int(q)], dtype=np.int64)
    return q.astype(np.float64)[None, :]


def landmark_distances(model, src, queries):
    """Distances from a batch of queries (index array or vector rows) to the landmarks."""
    return src.cross_distances(queries, model.landmark_indices)


def _pou_weights(dist, alpha):
    bumps = np.maximum(alpha - dist, 0.0)
    total = bumps.sum(axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        return bumps / total, total[..., 0] > 0


def partition_of_unity(model, b, src):
    """Nonzero ``phi_k(b)`` as ``{landmark position k: value}``.

    Raises
    ------
    NotCoveredError
        If ``b`` is at distance ``>= alpha`` from every landmark.
    """
    dist = landmark_distances(model, src, _single_query(b))[0]
    phi, covered = _pou_weights(dist, model.alpha)
    if not covered:
        raise NotCoveredError(f"query is not within {model.alpha} of any landmark")
    support = np.flatnonzero(phi > 0)
    return {int(k): float(phi[k]) for k in support}


def _turns_from_distances(model, dist, via=None):
    """Turns for a block of queries given their landmark distances.

    ``via`` optionally fixes the covering landmark per query (array of
    positions); by default the nearest landmark is used.
    """
    phi, covered = _pou_weights(dist, model.alpha)
    out = np.full(dist.shape[0], np.nan)
    rows = np.flatnonzero(covered)
    if rows.size == 0:
        return out
    phi = phi[rows]
    if via is None:
        j = np.argmin(dist[rows], axis=1)
    else:
        j = np.asarray(via, dtype=np.int64)[rows]
        if np.any(dist[rows, j] >= model.alpha):
            raise NotCoveredError("query is not inside the ball of the requested landmark")
    # phi_k > 0 and phi_j > 0 force d(l_j, l_k) < 2 alpha, i.e. an edge of the complex
    if np.any((phi > 0) & ~model.adjacency[j]):
        raise AssertionError("covering balls meet outside R_{2 alpha}: inconsistent model")
    out[rows] = model.tau[j] + np.einsum("ij,ij->i", phi, model.theta_matrix[j])
    return out


def evaluate(model, b, src, via=None):
    """Angle of the coordinate at one query, or ``NaN`` if not covered.

    ``via`` selects the covering landmark (position in the landmark list) used
    in the formula; any covering landmark yields the same angle.
    """
    dist = landmark_distances(model, src, _single_query(b))
    v = None if via is None else np.array([via])
    return float(turns_to_angle(_turns_from_distances(model, dist, v))[0])


def evaluate_all(model, src, targets=None) -> AngleAssignment:
    """Batch evaluation in input order.

    ``targets`` is ``None`` (every data point), an integer index array, or a
    2-D array of raw vectors.
    """
    if targets is None:
        targets = np.arange(src.n)
    targets = np.asarray(targets)
    if targets.ndim == 1 and not np.issubdtype(targets.dtype, np.integer):
        targets = targets.astype(np.int64)
    turns = np.empty(targets.shape[0])
    for s in range(0, targets.shape[0], _BATCH):
        block = targets[s:s + _BATCH]
        turns[s:s + _BATCH] = _turns_from_distances(model, landmark_distances(model, src, block))
    return AngleAssignment(turns_to_angle(turns))


def combine(assignments, coefficients) -> AngleAssignment:
    """Pointwise integer combination ``sum c_i angle_i`` of circle-valued maps."""
    if len(assignments) != len(coefficients):
        raise ValueError("one integer coefficient per assignment required")
    if not assignments:
        raise ValueError("nothing to combine")
    n = len(assignments[0])
    if any(len(a) != n for a in assignments):
        raise ValueError("assignments have different lengths")
    total = np.zeros(n)
    for a, c in zip(assignments, coefficients):
        if int(c) != c:
            raise ValueError(f"coefficients must be integers, got {c}")
        total = total + int(c) * a.angles
    return AngleAssignment(wrap_angle(total))


def winding_number(angles):
    """Signed number of turns of a closed loop sampled by ``angles``.

    Consecutive differences (including last to first) are wrapped to
    ``(-pi, pi]`` and summed; the loop must be sampled finely enough that the
    true increments stay below ``pi``.
    """
    a = np.asarray(angles, dtype=np.float64)
    if np.any(np.isnan(a)):
        raise NotCoveredError("loop leaves the domain of the coordinate")
    steps = wrap_angle(np.diff(np.append(a, a[0])))
    return int(np.rint(steps.sum() / (2.0 * np.pi)))


def max_jump(angles):
    """Largest circular distance between consecutive angles (open path)."""
    a = np.asarray(angles, dtype=np.float64)
    return float(np.max(np.abs(wrap_angle(np.diff(a))), initial=0.0))
