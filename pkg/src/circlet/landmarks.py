"""Landmark selection by maxmin (farthest point) or seeded random sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import PortableRNG


@dataclass(frozen=True)
class LandmarkSet:
    """Ordered landmark indices and their coverage radius.

    Attributes
    ----------
    indices : ndarray of int
        Distinct data indices, in selection order.
    coverage_radius : float
        ``r_L = max_x min_l d(x, l)`` over all data points.
    method : str
        ``"maxmin"`` or ``"random"``.
    seed_or_start : int
        Start index for maxmin, generator seed for random sampling.
    """

    indices: np.ndarray
    coverage_radius: float
    method: str
    seed_or_start: int

    def __len__(self):
        return len(self.indices)

    @property
    def r_L(self):
        return self.coverage_radius


TIE_RTOL = 1e-12


def _check_count(src, N):
    if not 1 <= N <= src.n:
        raise ValueError(f"landmark count must be in [1, {src.n}], got {N}")


def maxmin_landmarks(src, N, start=0) -> LandmarkSet:
    """Greedy farthest-point landmarks starting from ``start``.

    Each new landmark maximizes the distance to the nearest landmark already
    chosen. Scores within a relative ``TIE_RTOL`` of the maximum count as
    ties, which go to the lowest data index; this keeps symmetric
    configurations from being decided by rounding noise.
    """
    N = int(N)
    _check_count(src, N)
    if not 0 <= start < src.n:
        raise ValueError(f"start index {start} out of range for {src.n} points")
    idx = np.empty(N, dtype=np.int64)
    idx[0] = start
    nearest = src.distances_from_index(start)
    # chosen points are masked so duplicate data points cannot be re-selected
    score = nearest.copy()
    score[start] = -1.0
    for k in range(1, N):
        top = score.max()
        nxt = int(np.flatnonzero(score >= top - TIE_RTOL * top)[0])
        idx[k] = nxt
        score[nxt] = -1.0
        np.minimum(nearest, src.distances_from_index(nxt), out=nearest)
        np.minimum(score, nearest, out=score, where=score >= 0)
    idx.flags.writeable = False
    return LandmarkSet(idx, float(nearest.max()), "maxmin", int(start))


def random_landmarks(src, N, seed=0) -> LandmarkSet:
    """``N`` distinct landmarks drawn with the portable generator in ``_rng``."""
    N = int(N)
    _check_count(src, N)
    idx = PortableRNG(seed).sample_without_replacement(src.n, N)
    idx.flags.writeable = False
    return LandmarkSet(idx, coverage_radius(src, idx), "random", int(seed))


def coverage_radius(src, indices):
    """Hausdorff distance from the data set to the landmark subset."""
    indices = np.asarray(indices, dtype=np.int64)
    nearest = np.full(src.n, np.inf)
    for s in range(0, src.n, 4096):
        block = src.cross_distances(np.arange(s, min(s + 4096, src.n)), indices)
        nearest[s:s + block.shape[0]] = block.min(axis=1)
    return float(nearest.max())
