"""Lifting Z/q cocycles to integer cocycles by centered residues."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cohomology import cochain_vector, vector_cochain
from .errors import LiftFailureError


@dataclass(frozen=True)
class IntegerCochain:
    """Integer edge cochain on the Rips complex ``R_scale``.

    ``values`` maps ``(i, j)`` with ``i < j`` to an integer; the value on the
    reversed edge ``(j, i)`` is the negative (see :meth:`value`).
    """

    values: dict
    scale: float

    def value(self, i, j):
        if i < j:
            return self.values.get((i, j), 0)
        return -self.values.get((j, i), 0)

    def vector(self, filt):
        return cochain_vector(self.values, filt)


def centered_residue(values, q):
    """Map ``{0, ..., q-1}`` to ``{-(q-1)/2, ..., (q-1)/2}`` keeping the class mod q."""
    v = np.asarray(values, dtype=np.int64) % q
    return np.where(v > (q - 1) // 2, v - q, v)


def integer_coboundary(vec, filt):
    """``d1 vec`` on the triangles of ``filt`` over the integers."""
    return filt.edge_coboundary @ np.asarray(vec, dtype=np.int64)


def lift_cocycle(eta_q, filt_2alpha, q) -> IntegerCochain:
    """Integer cocycle ``eta`` with ``eta mod q == eta_q`` on ``filt_2alpha``.

    Every edge value is replaced by its centered residue; the result is then
    checked to be a cocycle over the integers on every triangle.

    Raises
    ------
    LiftFailureError
        If the centered lift is not an integer cocycle. Repairing it would
        require solving a Diophantine linear system, which is not
        implemented; retry with another prime.
    """
    vec = centered_residue(cochain_vector(eta_q, filt_2alpha), q)
    bad = np.flatnonzero(integer_coboundary(vec, filt_2alpha))
    if bad.size:
        tris = [tuple(int(x) for x in filt_2alpha.triangles[t]) for t in bad[:5]]
        raise LiftFailureError(
            f"centered lift of the Z/{q} cocycle is not an integer cocycle on "
            f"{bad.size} triangle(s), e.g. {tris}. Retry with a different prime "
            "(--prime); the Diophantine repair of the lift is not implemented.",
            q=q, bad_triangles=tris)
    return IntegerCochain(vector_cochain(vec, filt_2alpha), float(filt_2alpha.threshold))
