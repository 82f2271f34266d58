"""Data ingestion, distance evaluation and result serialization.

A :class:`DistanceSource` wraps either an explicit distance matrix or a point
cloud with the Euclidean metric. Point-cloud distances are computed on demand,
so the full ``n x n`` matrix is never materialized for large clouds.

Queries (``QueryPoint``) are either an integer index into the data set or,
for point clouds only, a raw coordinate vector of the cloud's dimension.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import FormatError, UnsupportedQueryError, ValidationError

QueryPoint = Union[int, np.integer, np.ndarray]

EXPLICIT_MATRIX = "explicit-matrix"
POINT_CLOUD = "point-cloud"

SYMMETRY_RTOL = 1e-9
DIAGONAL_ATOL = 1e-12

# rows per block when streaming point-cloud distances
_CHUNK = 2048


def _readonly(a):
    a = np.array(a, dtype=np.float64, copy=True)
    a.flags.writeable = False
    return a


def euclidean_cross(A, B):
    """Euclidean distances between the rows of ``A`` and the rows of ``B``.

    Computed from coordinate differences (never via the Gram-matrix identity)
    so that ``d(a, b)`` and ``d(b, a)`` are bit-identical.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    out = np.empty((A.shape[0], B.shape[0]))
    for s in range(0, A.shape[0], _CHUNK):
        diff = A[s:s + _CHUNK, None, :] - B[None, :, :]
        out[s:s + _CHUNK] = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    return out


@dataclass(frozen=True)
class DistanceSource:
    """Immutable access to the pairwise distances of a finite metric space.

    Use :meth:`from_points` or :meth:`from_matrix` (or the CSV loaders) rather
    than the constructor.
    """

    kind: str
    n: int
    matrix: Optional[np.ndarray] = None
    points: Optional[np.ndarray] = None
    metric_rule: str = "euclidean"

    @classmethod
    def from_points(cls, points):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValidationError("point cloud must be a non-empty 2-D array")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("point cloud contains non-finite coordinates")
        return cls(POINT_CLOUD, pts.shape[0], points=_readonly(pts))

    @classmethod
    def from_matrix(cls, matrix, rtol=SYMMETRY_RTOL, diag_atol=DIAGONAL_ATOL):
        """Validate and symmetrize an explicit distance matrix."""
        return cls(EXPLICIT_MATRIX, *_validated_matrix(matrix, rtol, diag_atol),
                   metric_rule="custom-precomputed")

    @property
    def dim(self):
        return None if self.points is None else self.points.shape[1]

    def _check_index(self, i):
        if not 0 <= int(i) < self.n:
            raise IndexError(f"index {i} out of range for {self.n} points")
        return int(i)

    def _as_vectors(self, queries):
        """Coordinates for a batch of queries (point-cloud kind only)."""
        if self.kind != POINT_CLOUD:
            raise UnsupportedQueryError(
                "raw-vector queries need ambient coordinates; this source is an "
                "explicit distance matrix, query by index instead")
        q = np.asarray(queries, dtype=np.float64)
        if q.ndim == 1:
            q = q[None, :]
        if q.shape[1] != self.dim:
            raise ValueError(
                f"query vectors have dimension {q.shape[1]}, cloud has {self.dim}")
        return q

    def distance(self, a: QueryPoint, b: QueryPoint) -> float:
        """Distance between two query points."""
        a_idx = np.ndim(a) == 0
        b_idx = np.ndim(b) == 0
        if a_idx and b_idx:
            i, j = self._check_index(a), self._check_index(b)
            if self.kind == EXPLICIT_MATRIX:
                return float(self.matrix[i, j])
            return float(euclidean_cross(self.points[i], self.points[j])[0, 0])
        va = self.points[self._check_index(a)] if a_idx else self._as_vectors(a)
        vb = self.points[self._check_index(b)] if b_idx else self._as_vectors(b)
        return float(euclidean_cross(va, vb)[0, 0])

    def distances_from_index(self, i):
        """Distances from data point ``i`` to every data point (length ``n``)."""
        i = self._check_index(i)
        if self.kind == EXPLICIT_MATRIX:
            return np.array(self.matrix[i])
        return euclidean_cross(self.points[i], self.points)[0]

    def cross_distances(self, queries, targets):
        """Distance block between queries and data indices ``targets``.

        ``queries`` is either a 1-D integer index array or a 2-D array of raw
        vectors (point clouds only).
        """
        targets = np.asarray(targets, dtype=np.int64)
        q = np.asarray(queries)
        if q.ndim == 1 and np.issubdtype(q.dtype, np.integer):
            if q.size and (q.min() < 0 or q.max() >= self.n):
                raise IndexError("query index out of range")
            if self.kind == EXPLICIT_MATRIX:
                return np.array(self.matrix[np.ix_(q, targets)])
            return euclidean_cross(self.points[q], self.points[targets])
        vecs = self._as_vectors(q)
        return euclidean_cross(vecs, self.points[targets])

    def submatrix(self, indices):
        """Materialized distance matrix among the data points ``indices``."""
        idx = np.asarray(indices, dtype=np.int64)
        D = np.triu(self.cross_distances(idx, idx), 1)
        return D + D.T


def _validated_matrix(matrix, rtol, diag_atol):
    M = np.array(matrix, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ValidationError(f"distance matrix must be square and non-empty, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValidationError("distance matrix contains non-finite entries")
    if np.any(M < 0):
        i, j = np.argwhere(M < 0)[0]
        raise ValidationError(f"negative distance {M[i, j]} at ({i}, {j})")
    diag = np.abs(np.diag(M))
    if np.any(diag > diag_atol):
        i = int(np.argmax(diag))
        raise ValidationError(f"nonzero diagonal entry {M[i, i]} at ({i}, {i})")
    gap = np.abs(M - M.T)
    scale = np.maximum(np.abs(M), np.abs(M.T))
    bad = gap > rtol * scale
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise ValidationError(
            f"asymmetric distances: d({i},{j})={M[i, j]} vs d({j},{i})={M[j, i]}")
    M = 0.5 * (M + M.T)
    np.fill_diagonal(M, 0.0)
    return M.shape[0], _readonly(M)


def _read_rows(path, delimiter, header):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    rows = []
    width = None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if header and lineno == 1:
                continue
            text = line.strip()
            if not text:
                continue
            fields = text.split(delimiter)
            try:
                values = [float(f) for f in fields]
            except ValueError:
                raise FormatError(f"non-numeric field in {text!r}", line=lineno) from None
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise FormatError(
                    f"expected {width} fields, found {len(values)}", line=lineno)
            rows.append(values)
    if not rows:
        raise FormatError(f"{path} contains no data rows", line=0)
    return np.array(rows, dtype=np.float64)


def load_point_cloud(path, delimiter=",", header=False) -> DistanceSource:
    """Read one point per CSV row; the metric is Euclidean."""
    return DistanceSource.from_points(_read_rows(path, delimiter, header))


def load_distance_matrix(path, delimiter=",", header=False) -> DistanceSource:
    """Read a square CSV distance matrix, validating metric invariants."""
    return DistanceSource.from_matrix(_read_rows(path, delimiter, header))


def distance(src: DistanceSource, a: QueryPoint, b: QueryPoint) -> float:
    return src.distance(a, b)


# ---------------------------------------------------------------------------
# serialization

def format_float(x):
    """Shortest round-trip text for a float; empty string for NaN markers."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return repr(float(x))


def write_points_csv(path, points, delimiter=","):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in np.atleast_2d(points):
            fh.write(delimiter.join(format_float(v) for v in row) + "\n")


def write_matrix_csv(path, matrix, delimiter=","):
    write_points_csv(path, matrix, delimiter)


def write_angles_csv(path, point_ids, columns, names=None):
    """Write ``point_id,angle[,angle_2,...]``; NaN markers become empty fields."""
    columns = [np.asarray(c, dtype=np.float64) for c in columns]
    if names is None:
        names = ["angle"] + [f"angle_{k + 1}" for k in range(1, len(columns))]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(["point_id", *names]) + "\n")
        for r, pid in enumerate(point_ids):
            fh.write(",".join([str(pid), *(format_float(c[r]) for c in columns)]) + "\n")


def dump_json(obj):
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(path, obj):
    Path(path).write_text(dump_json(obj), encoding="utf-8")
