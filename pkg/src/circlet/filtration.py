"""Rips filtrations on a landmark set, up to dimension 2.

Simplices enter at their diameter and a complex at scale ``s`` holds the
simplices with diameter strictly below ``s``. Edges and triangles are kept in
filtration order, sorted by ``(diameter, i, j[, k])``; that order is what the
persistence reduction consumes, so it is fixed here once.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True, eq=False)
class RipsFiltration:
    """Vertices, edges and triangles of a landmark Rips complex.

    Attributes
    ----------
    distances : ndarray (N, N)
        Landmark distance matrix the filtration was built from.
    edges : ndarray (E, 2)
        Vertex pairs ``i < j`` in filtration order.
    edge_diameters : ndarray (E,)
    triangles : ndarray (T, 3)
        Vertex triples ``i < j < k`` in filtration order.
    triangle_diameters : ndarray (T,)
    threshold : float
        Simplices with diameter ``< threshold`` are present.
    """

    distances: np.ndarray
    edges: np.ndarray
    edge_diameters: np.ndarray
    triangles: np.ndarray
    triangle_diameters: np.ndarray
    threshold: float

    @property
    def n_vertices(self):
        return self.distances.shape[0]

    @property
    def n_edges(self):
        return self.edges.shape[0]

    @property
    def n_triangles(self):
        return self.triangles.shape[0]

    @cached_property
    def edge_index(self):
        """``(N, N)`` lookup: position of edge ``{i, j}`` or ``-1``."""
        N = self.n_vertices
        lut = np.full((N, N), -1, dtype=np.int64)
        pos = np.arange(self.n_edges)
        lut[self.edges[:, 0], self.edges[:, 1]] = pos
        lut[self.edges[:, 1], self.edges[:, 0]] = pos
        lut.flags.writeable = False
        return lut

    @cached_property
    def vertex_coboundary(self):
        """Sparse ``(E, N)`` matrix of ``d0``: ``(d0 f)(i, j) = f(j) - f(i)``."""
        E, N = self.n_edges, self.n_vertices
        rows = np.repeat(np.arange(E), 2)
        cols = self.edges.ravel()
        vals = np.tile(np.array([-1, 1], dtype=np.int64), E)
        return sp.csr_matrix((vals, (rows, cols)), shape=(E, N))

    @cached_property
    def edge_coboundary(self):
        """Sparse ``(T, E)`` matrix of ``d1`` in CSC layout.

        For a triangle ``[a, b, c]``: ``(d1 g)[a,b,c] = g(b,c) - g(a,c) + g(a,b)``.
        """
        T, E = self.n_triangles, self.n_edges
        if T == 0:
            return sp.csc_matrix((0, E), dtype=np.int64)
        a, b, c = self.triangles.T
        lut = self.edge_index
        cols = np.stack([lut[b, c], lut[a, c], lut[a, b]], axis=1).ravel()
        if np.any(cols < 0):
            raise AssertionError("triangle with a missing face edge")
        rows = np.repeat(np.arange(T), 3)
        vals = np.tile(np.array([1, -1, 1], dtype=np.int64), T)
        return sp.csc_matrix((vals, (rows, cols)), shape=(T, E))

    def simplices(self):
        """Iterate ``(dim, vertices, diameter)`` in filtration order by dimension."""
        for v in range(self.n_vertices):
            yield 0, (v,), 0.0
        for e, d in zip(self.edges, self.edge_diameters):
            yield 1, tuple(int(x) for x in e), float(d)
        for t, d in zip(self.triangles, self.triangle_diameters):
            yield 2, tuple(int(x) for x in t), float(d)

    def to_rows(self):
        """Debug dump rows ``(dim, i, j, k, diameter)``; missing vertices are ``-1``."""
        rows = []
        for e, d in zip(self.edges, self.edge_diameters):
            rows.append((1, int(e[0]), int(e[1]), -1, float(d)))
        for t, d in zip(self.triangles, self.triangle_diameters):
            rows.append((2, int(t[0]), int(t[1]), int(t[2]), float(d)))
        return rows


def _frozen(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.flags.writeable = False
    return a


def build_rips(landmark_distances, threshold, max_dim=2) -> RipsFiltration:
    """All simplices of diameter ``< threshold`` with dimension ``<= max_dim``.

    Parameters
    ----------
    landmark_distances : ndarray (N, N)
        Symmetric distance matrix on the landmarks.
    threshold : float
        Open upper bound on simplex diameters; must be positive.
    max_dim : {1, 2}
    """
    D = np.asarray(landmark_distances, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError("landmark distance matrix must be square")
    if not threshold > 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    if max_dim not in (1, 2):
        raise ValueError("max_dim must be 1 or 2")
    N = D.shape[0]
    threshold = float(threshold)

    ii, jj = np.triu_indices(N, 1)
    ed = D[ii, jj]
    keep = ed < threshold
    ii, jj, ed = ii[keep], jj[keep], ed[keep]
    order = np.lexsort((jj, ii, ed))
    edges = np.stack([ii[order], jj[order]], axis=1)
    edge_diam = ed[order]

    tris, tri_diam = [], []
    if max_dim == 2:
        close = D < threshold
        for i in range(N):
            nb = np.flatnonzero(close[i, i + 1:]) + i + 1
            if nb.size < 2:
                continue
            a, b = np.triu_indices(nb.size, 1)
            j, k = nb[a], nb[b]
            ok = close[j, k]
            j, k = j[ok], k[ok]
            if j.size == 0:
                continue
            diam = np.maximum(np.maximum(D[i, j], D[i, k]), D[j, k])
            tris.append(np.stack([np.full(j.size, i), j, k], axis=1))
            tri_diam.append(diam)
    if tris:
        tris = np.concatenate(tris)
        tri_diam = np.concatenate(tri_diam)
        order = np.lexsort((tris[:, 2], tris[:, 1], tris[:, 0], tri_diam))
        tris, tri_diam = tris[order], tri_diam[order]
    else:
        tris = np.zeros((0, 3), dtype=np.int64)
        tri_diam = np.zeros(0)

    return RipsFiltration(
        distances=_frozen(D, np.float64),
        edges=_frozen(edges.reshape(-1, 2), np.int64),
        edge_diameters=_frozen(edge_diam, np.float64),
        triangles=_frozen(tris, np.int64),
        triangle_diameters=_frozen(tri_diam, np.float64),
        threshold=threshold,
    )


def restrict(filt: RipsFiltration, s) -> RipsFiltration:
    """Sub-filtration of simplices with diameter ``< s`` (requires ``s <= threshold``)."""
    s = float(s)
    if s > filt.threshold:
        raise ValueError(
            f"cannot restrict to {s}: filtration was only built up to {filt.threshold}")
    ek = filt.edge_diameters < s
    tk = filt.triangle_diameters < s
    # prefixes of the sorted arrays, so filtration order is preserved
    return RipsFiltration(
        distances=filt.distances,
        edges=_frozen(filt.edges[ek], np.int64),
        edge_diameters=_frozen(filt.edge_diameters[ek], np.float64),
        triangles=_frozen(filt.triangles[tk], np.int64),
        triangle_diameters=_frozen(filt.triangle_diameters[tk], np.float64),
        threshold=s,
    )
