"""End-to-end computation of sparse circular coordinates.

landmarks -> Rips filtration -> persistent cohomology -> scale choice ->
representative at ``2 alpha`` -> integer lift -> harmonic smoothing ->
evaluation on the data (or any other covered queries).
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cohomology import (DEFAULT_PRIME, choose_scale, cochain_vector, diagram,
                         persistent_cohomology, representative_at_scale, vector_cochain)
from .coords import HARMONIC, INTEGER, AngleAssignment, CoordinateModel, combine, evaluate_all
from .errors import NoQualifyingClassError
from .filtration import build_rips, restrict
from .harmonic import WeightScheme, harmonic_smooth
from .integer_lift import lift_cocycle
from .landmarks import maxmin_landmarks, random_landmarks

MOST_PERSISTENT = "most-persistent"


@contextmanager
def stage(name, timings):
    """Time a block into ``timings[name]`` and tag escaping errors with the stage."""
    t0 = time.perf_counter()
    try:
        yield
    except Exception as exc:
        if not hasattr(exc, "stage"):
            exc.stage = name
        raise
    finally:
        timings[name] = timings.get(name, 0.0) + (time.perf_counter() - t0)


def parse_selector(text):
    """``"most-persistent"``, ``"3"`` or ``"0+4"`` -> selector or tuple of indices."""
    text = str(text).strip()
    if text == MOST_PERSISTENT:
        return MOST_PERSISTENT
    try:
        parts = tuple(int(p) for p in text.split("+"))
    except ValueError:
        raise ValueError(f"class selector must be an index, K1+K2 or {MOST_PERSISTENT!r}; "
                         f"got {text!r}") from None
    if any(p < 0 for p in parts):
        raise ValueError(f"class indices must be nonnegative, got {text!r}")
    return parts[0] if len(parts) == 1 else parts


@dataclass
class ClassResult:
    """One requested coordinate (a single class or a ``+`` combination).

    ``path`` is ``"single"``, ``"cocycle"`` (representatives summed before the
    lift) or ``"map"`` (angles of separately computed coordinates added).
    """

    label: str
    path: str
    indices: tuple
    alpha: Optional[float]
    assignment: AngleAssignment
    models: list = field(default_factory=list)
    harmonics: list = field(default_factory=list)
    lifts: list = field(default_factory=list)
    representatives: list = field(default_factory=list)
    filtrations: list = field(default_factory=list)


@dataclass
class PipelineResult:
    landmarks: object
    filtration: object
    pairs: list
    classes: list
    q: int
    t: float
    timings: dict

    @property
    def dim1(self):
        return diagram(self.pairs, 1)


def select_landmarks(src, n_landmarks, sampling="maxmin", start=0, seed=0):
    if sampling == "maxmin":
        return maxmin_landmarks(src, n_landmarks, start)
    if sampling == "random":
        return random_landmarks(src, n_landmarks, seed)
    raise ValueError(f"unknown sampling {sampling!r}")


def _co_alive_alpha(chosen, r_L, t, threshold):
    lo = max([p.birth for p in chosen] + [r_L])
    hi = min(p.death if p.is_finite else threshold for p in chosen)
    if not lo < hi / 2.0:
        return None
    return t * lo + (1.0 - t) * hi / 2.0


def _coordinate(src, landmarks, filt, eta_q, alpha, q, weights, solver, tol, mode, label, timings):
    """Lift, smooth and evaluate one Z/q cocycle on ``R_{2 alpha}``."""
    filt2 = restrict(filt, 2.0 * alpha)
    with stage("lift", timings):
        eta = lift_cocycle(eta_q, filt2, q)
    hp = None
    if mode == HARMONIC:
        with stage("harmonic", timings):
            hp = harmonic_smooth(eta, filt2, weights, solver=solver, tol=tol)
        model = CoordinateModel.from_harmonic(landmarks, alpha, filt2, hp, q, label, src)
    elif mode == INTEGER:
        model = CoordinateModel.from_integer(landmarks, alpha, filt2, eta, q, label, src)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return filt2, eta, hp, model


def class_coordinates(src, landmarks, filt, pairs, selector, q=DEFAULT_PRIME, t=0.5,
                      weights=None, solver="iterative", tol=1e-10, mode=HARMONIC,
                      targets=None, timings=None) -> ClassResult:
    """Coordinate for one selector on an already computed diagram."""
    timings = {} if timings is None else timings
    weights = WeightScheme() if weights is None else weights
    r_L = landmarks.coverage_radius
    dim1 = diagram(pairs, 1)

    if isinstance(selector, tuple):
        for k in selector:
            if not 0 <= k < len(dim1):
                raise ValueError(f"class index {k} out of range: {len(dim1)} dimension-1 pairs")
        chosen = [dim1[k] for k in selector]
        label = "+".join(str(k) for k in selector)
        with stage("scale", timings):
            alpha = _co_alive_alpha(chosen, r_L, t, filt.threshold)
        if alpha is not None:
            with stage("representative", timings):
                sub = restrict(filt, 2 * alpha)
                total = np.zeros(sub.n_edges, dtype=np.int64)
                for p in chosen:
                    total += cochain_vector(representative_at_scale(p, filt, 2 * alpha), sub)
                eta_q = vector_cochain(total % q, sub)
            filt2, eta, hp, model = _coordinate(src, landmarks, filt, eta_q, alpha, q, weights,
                                                solver, tol, mode, label, timings)
            with stage("evaluate", timings):
                assignment = evaluate_all(model, src, targets)
            return ClassResult(label, "cocycle", selector, alpha, assignment, [model],
                               [hp], [eta], [eta_q], [filt2])
        parts = [class_coordinates(src, landmarks, filt, pairs, k, q, t, weights, solver, tol,
                                   mode, targets, timings) for k in selector]
        with stage("evaluate", timings):
            assignment = combine([p.assignment for p in parts], [1] * len(parts))
        res = ClassResult(label, "map", selector, None, assignment)
        for p in parts:
            res.models += p.models
            res.harmonics += p.harmonics
            res.lifts += p.lifts
            res.representatives += p.representatives
            res.filtrations += p.filtrations
        return res

    with stage("scale", timings):
        choice = choose_scale(pairs, r_L, t, selector, threshold=filt.threshold)
    label = str(choice.index)
    with stage("representative", timings):
        eta_q = representative_at_scale(choice.pair, filt, 2.0 * choice.alpha)
    filt2, eta, hp, model = _coordinate(src, landmarks, filt, eta_q, choice.alpha, q, weights,
                                        solver, tol, mode, label, timings)
    with stage("evaluate", timings):
        assignment = evaluate_all(model, src, targets)
    return ClassResult(label, "single", (choice.index,), choice.alpha, assignment, [model],
                       [hp], [eta], [eta_q], [filt2])


def sparse_circular_coordinates(src, n_landmarks, classes=(MOST_PERSISTENT,), sampling="maxmin",
                                start=0, seed=0, q=DEFAULT_PRIME, t=0.5, weights=None,
                                solver="iterative", tol=1e-10, mode=HARMONIC, threshold=None,
                                targets=None, timings=None) -> PipelineResult:
    """Run the full pipeline on ``src``.

    Parameters
    ----------
    src : DistanceSource
    n_landmarks : int
    classes : sequence of selectors
        Each is ``"most-persistent"``, an index into the dimension-1 pairs
        ordered by decreasing persistence, a tuple of indices, or the text
        forms accepted by :func:`parse_selector`.
    threshold : float, optional
        Filtration threshold for persistence; defaults to the diameter of the
        landmark set.
    targets : optional
        Queries to evaluate (see :func:`circlet.coords.evaluate_all`).

    Errors raised by a stage carry that stage's name in ``exc.stage``.
    """
    timings = {} if timings is None else timings
    weights = WeightScheme() if weights is None else weights
    with stage("landmarks", timings):
        L = select_landmarks(src, n_landmarks, sampling, start, seed)
    with stage("filtration", timings):
        D = src.submatrix(L.indices)
        thr = float(D.max()) if threshold is None else float(threshold)
        if not thr > 0:
            raise ValueError("landmark set has zero diameter; nothing to filter")
        filt = build_rips(D, thr)
    with stage("cohomology", timings):
        pairs = persistent_cohomology(filt, q)
    results = []
    for sel in classes:
        if isinstance(sel, str):
            sel = parse_selector(sel)
        results.append(class_coordinates(src, L, filt, pairs, sel, q, t, weights, solver, tol,
                                         mode, targets, timings))
    return PipelineResult(L, filt, pairs, results, q, t, timings)


def qualifying_pairs(pairs, r_L, threshold=None):
    """Dimension-1 pairs with ``max(birth, r_L) < death / 2``."""
    out = []
    for p in diagram(pairs, 1):
        death = p.death if p.is_finite else threshold
        if death is not None and max(p.birth, r_L) < death / 2.0:
            out.append(p)
    return out


__all__ = [
    "MOST_PERSISTENT", "ClassResult", "PipelineResult", "NoQualifyingClassError",
    "class_coordinates", "parse_selector", "qualifying_pairs", "select_landmarks",
    "sparse_circular_coordinates", "stage",
]
