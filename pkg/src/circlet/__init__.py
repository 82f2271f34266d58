"""Sparse circular coordinates from persistent cohomology."""

from .cohomology import (DEFAULT_PRIME, PersistencePair, ScaleChoice, choose_scale, diagram,
                         persistent_cohomology, representative_at_scale)
from .coords import (AngleAssignment, CoordinateModel, combine, evaluate, evaluate_all,
                     partition_of_unity, winding_number)
from .errors import (CircletError, ConvergenceError, FormatError, LiftFailureError,
                     NoQualifyingClassError, NotCoveredError, UnsupportedQueryError,
                     ValidationError)
from .filtration import RipsFiltration, build_rips, restrict
from .harmonic import HarmonicPair, WeightScheme, harmonic_smooth
from .integer_lift import IntegerCochain, lift_cocycle
from .landmarks import LandmarkSet, maxmin_landmarks, random_landmarks
from .metric_io import DistanceSource, load_distance_matrix, load_point_cloud
from .pipeline import sparse_circular_coordinates

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_PRIME", "AngleAssignment", "CircletError", "ConvergenceError", "CoordinateModel",
    "DistanceSource", "FormatError", "HarmonicPair", "IntegerCochain", "LandmarkSet",
    "LiftFailureError", "NoQualifyingClassError", "NotCoveredError", "PersistencePair",
    "RipsFiltration", "ScaleChoice", "UnsupportedQueryError", "ValidationError", "WeightScheme",
    "build_rips", "choose_scale", "combine", "diagram", "evaluate", "evaluate_all",
    "harmonic_smooth", "lift_cocycle", "load_distance_matrix", "load_point_cloud",
    "maxmin_landmarks", "partition_of_unity", "persistent_cohomology", "random_landmarks",
    "representative_at_scale", "restrict", "sparse_circular_coordinates", "winding_number",
]
