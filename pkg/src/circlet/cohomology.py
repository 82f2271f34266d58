"""Persistent cohomology of a Rips filtration over Z/q, dimensions 0 and 1.

The coboundary matrix is reduced column by column, processing simplices in
decreasing filtration order; the pivot of a column is its earliest coface.
Edges that already died in dimension 0 are cleared (skipped) in dimension 1.
A nonzero reduced column for an edge ``e`` with pivot triangle ``t`` yields the
interval ``[diam e, diam t)``; the matching column of the reduction matrix is a
cocycle on every complex of the filtration in that interval, and is kept as
the class representative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NoQualifyingClassError
from .filtration import RipsFiltration, restrict

DEFAULT_PRIME = 47


def is_prime(q):
    q = int(q)
    if q < 2:
        return False
    for p in range(2, math.isqrt(q) + 1):
        if q % p == 0:
            return False
    return True


def check_prime(q):
    if not (isinstance(q, (int, np.integer)) and q > 2 and is_prime(q)):
        raise ValueError(f"coefficient modulus must be a prime > 2, got {q!r}")
    return int(q)


@dataclass(frozen=True)
class PersistencePair:
    """One interval of the persistence diagram.

    ``representative`` maps oriented edges ``(i, j)``, ``i < j``, to values in
    ``{1, ..., q-1}``; it is only set for dimension-1 pairs.
    ``birth_index``/``death_index`` are positions of the creating and
    destroying simplices in the filtration's edge/triangle arrays
    (vertex/edge arrays in dimension 0); ``death_index`` is ``None`` for
    classes alive at the filtration threshold.
    """

    dim: int
    birth: float
    death: float
    birth_index: int
    death_index: Optional[int] = None
    representative: Optional[dict] = field(default=None, repr=False, compare=False)
    q: int = DEFAULT_PRIME

    @property
    def persistence(self):
        return self.death - self.birth

    @property
    def is_finite(self):
        return math.isfinite(self.death)


@dataclass(frozen=True)
class ScaleChoice:
    """Selected class and the working scale ``alpha`` for it."""

    pair: PersistencePair
    index: int
    t: float
    alpha: float
    r_L: float
    death_used: float


def _axpy(target, source, factor, q):
    """``target += factor * source`` in Z/q, dropping zeros. Sparse dicts."""
    for k, v in source.items():
        x = (target.get(k, 0) + factor * v) % q
        if x:
            target[k] = x
        else:
            target.pop(k, None)


def _reduce(order, csc, q, skip=frozenset(), keep_v=False):
    """Reduce the columns ``order`` of a sparse coboundary matrix mod ``q``.

    Returns a list of ``(column, pivot_or_None, V_or_None)``. Pivots are the
    smallest row index, i.e. the earliest coface in filtration order.
    """
    indptr, indices, data = csc.indptr, csc.indices, csc.data
    pivot_owner = {}
    out = []
    for c in order:
        if c in skip:
            continue
        lo, hi = indptr[c], indptr[c + 1]
        R = {int(r): int(v) % q for r, v in zip(indices[lo:hi], data[lo:hi])}
        V = {c: 1} if keep_v else None
        while R:
            p = min(R)
            hit = pivot_owner.get(p)
            if hit is None:
                break
            Rk, Vk, inv_k = hit
            f = (-R[p] * inv_k) % q
            _axpy(R, Rk, f, q)
            if keep_v:
                _axpy(V, Vk, f, q)
        if R:
            p = min(R)
            pivot_owner[p] = (R, V, pow(R[p], -1, q))
            out.append((c, p, V))
        else:
            out.append((c, None, V))
    return out


def persistent_cohomology(filt: RipsFiltration, q=DEFAULT_PRIME):
    """Dimension 0 and 1 persistence pairs of ``filt`` over Z/q.

    Returns
    -------
    list of PersistencePair
        Dimension-0 pairs (by death, then vertex) followed by dimension-1
        pairs ordered by decreasing persistence, then birth, then birth edge.
        Zero-length intervals are omitted. Classes still alive at the
        threshold get ``death = inf``.
    """
    q = check_prime(q)
    N, E = filt.n_vertices, filt.n_edges
    ed, td = filt.edge_diameters, filt.triangle_diameters

    dim0 = []
    dead_edges = set()
    d0 = filt.vertex_coboundary.tocsc()
    for v, piv, _ in _reduce(range(N - 1, -1, -1), d0, q):
        if piv is None:
            dim0.append(PersistencePair(0, 0.0, math.inf, v, None, q=q))
            continue
        dead_edges.add(piv)
        if ed[piv] > 0.0:
            dim0.append(PersistencePair(0, 0.0, float(ed[piv]), v, piv, q=q))
    dim0.sort(key=lambda p: (p.death, p.birth_index))

    dim1 = []
    d1 = filt.edge_coboundary
    for e, piv, V in _reduce(range(E - 1, -1, -1), d1, q, skip=dead_edges, keep_v=True):
        birth = float(ed[e])
        death = math.inf if piv is None else float(td[piv])
        if death == birth:
            continue
        rep = {(int(filt.edges[k, 0]), int(filt.edges[k, 1])): v for k, v in sorted(V.items())}
        dim1.append(PersistencePair(1, birth, death, e, piv, rep, q))
    dim1.sort(key=lambda p: (-p.persistence, p.birth, p.birth_index))
    return dim0 + dim1


def diagram(pairs, dim):
    return [p for p in pairs if p.dim == dim]


def diagram_records(pairs):
    """JSON-ready rows ``{dim, birth, death, persistence}``; ``None`` for infinity."""
    rows = []
    for p in pairs:
        fin = p.is_finite
        rows.append({
            "dim": p.dim,
            "birth": p.birth,
            "death": p.death if fin else None,
            "persistence": p.persistence if fin else None,
        })
    return rows


# ---------------------------------------------------------------------------
# scale selection

def scale_alpha(birth, death, r_L, t=0.5):
    """``t * max(birth, r_L) + (1 - t) * death / 2`` without qualification checks."""
    return t * max(birth, r_L) + (1.0 - t) * death / 2.0


def _scale_inputs(pair, r_L, threshold):
    death = pair.death
    if not math.isfinite(death):
        if threshold is None:
            return None
        death = float(threshold)
    return max(pair.birth, r_L), death / 2.0, death


def choose_scale(pairs, r_L, t=0.5, selector="most-persistent", threshold=None) -> ScaleChoice:
    """Pick a dimension-1 class with ``max(birth, r_L) < death/2`` and its scale.

    ``alpha = t * max(birth, r_L) + (1 - t) * death / 2``.

    Parameters
    ----------
    pairs : list of PersistencePair
    r_L : float
        Landmark coverage radius.
    t : float in (0, 1)
    selector : int or "most-persistent"
        An integer indexes the dimension-1 pairs in the order given
        (``persistent_cohomology`` orders them by decreasing persistence).
    threshold : float, optional
        Filtration threshold. When given, classes alive at the threshold are
        treated as dying there; otherwise they cannot be selected.
    """
    if not 0.0 < t < 1.0:
        raise ValueError(f"t must lie strictly between 0 and 1, got {t}")
    dim1 = diagram(pairs, 1)

    def violation(p):
        s = _scale_inputs(p, r_L, threshold)
        return None if s is None else s[1] - s[0]

    def fail(reason, cand):
        if cand is None:
            raise NoQualifyingClassError(f"{reason}; the dimension-1 diagram is empty")
        lhs, rhs, _ = _scale_inputs(cand, r_L, threshold) or (math.nan, math.nan, None)
        raise NoQualifyingClassError(
            f"{reason}; best candidate (birth={cand.birth:.6g}, death={cand.death:.6g}) "
            f"violates max{{a, r_L}} < b/2: max{{{cand.birth:.6g}, {r_L:.6g}}} = {lhs:.6g} "
            f">= b/2 = {rhs:.6g}",
            candidate=cand, lhs=lhs, rhs=rhs)

    if selector == "most-persistent":
        best, best_key = None, None
        for k, p in enumerate(dim1):
            gap = violation(p)
            if gap is None or gap <= 0:
                continue
            key = (-p.persistence, p.birth, k)
            if best_key is None or key < best_key:
                best, best_key = k, key
        if best is None:
            scored = [(violation(p), -k) for k, p in enumerate(dim1) if violation(p) is not None]
            cand = dim1[-max(scored)[1]] if scored else (dim1[0] if dim1 else None)
            fail("no dimension-1 class satisfies max{a, r_L} < b/2", cand)
        index = best
    else:
        index = int(selector)
        if not 0 <= index < len(dim1):
            raise ValueError(f"class index {index} out of range: {len(dim1)} dimension-1 pairs")
        gap = violation(dim1[index])
        if gap is None or gap <= 0:
            fail(f"class {index} does not qualify", dim1[index])

    pair = dim1[index]
    lhs, rhs, death = _scale_inputs(pair, r_L, threshold)
    alpha = scale_alpha(pair.birth, death, r_L, t)
    return ScaleChoice(pair, index, float(t), float(alpha), float(r_L), float(death))


# ---------------------------------------------------------------------------
# representatives

def cochain_vector(cochain, filt, dtype=np.int64):
    """Dense vector over ``filt.edges`` from a sparse ``{(i, j): value}`` cochain.

    Entries on edges absent from ``filt`` are ignored.
    """
    vec = np.zeros(filt.n_edges, dtype=dtype)
    if not cochain:
        return vec
    keys = np.array(list(cochain.keys()), dtype=np.int64)
    vals = np.array(list(cochain.values()), dtype=dtype)
    pos = filt.edge_index[keys[:, 0], keys[:, 1]]
    # swapped orientation flips sign
    sign = np.where(keys[:, 0] < keys[:, 1], 1, -1).astype(dtype)
    ok = pos >= 0
    np.add.at(vec, pos[ok], sign[ok] * vals[ok])
    return vec


def vector_cochain(vec, filt):
    """Sparse ``{(i, j): value}`` from a vector over ``filt.edges`` (zeros dropped)."""
    nz = np.flatnonzero(vec)
    return {(int(filt.edges[k, 0]), int(filt.edges[k, 1])): vec[k].item() for k in nz}


def coboundary_mod(vec, filt, q):
    """``d1 vec mod q`` on the triangles of ``filt`` (exact integer arithmetic)."""
    return (filt.edge_coboundary @ np.asarray(vec, dtype=np.int64)) % q


def representative_at_scale(pair: PersistencePair, filt: RipsFiltration, s):
    """Z/q cocycle for ``pair`` on the complex ``R_s``, ``birth < s <= death``.

    The stored reduction column is restricted to edges of diameter ``< s``
    and checked. Should the check ever fail, the reduction is redone on the
    truncated filtration, where the class survives to the threshold.
    """
    if pair.dim != 1 or pair.representative is None:
        raise ValueError("only dimension-1 pairs carry representatives")
    s = float(s)
    upper = pair.death if pair.is_finite else filt.threshold
    if not pair.birth < s <= upper:
        raise ValueError(f"scale {s} outside ({pair.birth}, {upper}] for this class")
    sub = restrict(filt, s)
    q = pair.q
    vec = cochain_vector(pair.representative, sub) % q
    if not np.any(coboundary_mod(vec, sub, q)):
        return vector_cochain(vec, sub)
    for p in persistent_cohomology(sub, q):
        if p.dim == 1 and p.birth_index == pair.birth_index and not p.is_finite:
            vec = cochain_vector(p.representative, sub) % q
            if not np.any(coboundary_mod(vec, sub, q)):
                return vector_cochain(vec, sub)
    raise AssertionError("no valid representative found at scale %r" % s)
