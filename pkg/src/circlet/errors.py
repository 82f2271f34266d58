"""Exception hierarchy shared by all pipeline stages."""


class CircletError(Exception):
    """Base class for every error raised deliberately by circlet."""


class FormatError(CircletError, ValueError):
    """An input file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(CircletError, ValueError):
    """Parsed input violates the metric invariants."""


class UnsupportedQueryError(CircletError, TypeError):
    """A raw-vector query was issued against a source without ambient geometry."""


class NotCoveredError(CircletError, ValueError):
    """A query point lies outside every landmark ball."""


class NoQualifyingClassError(CircletError):
    """No persistence pair satisfies ``max(birth, r_L) < death / 2``.

    Attributes
    ----------
    candidate : PersistencePair or None
        The pair that came closest (largest ``death/2 - max(birth, r_L)``).
    lhs, rhs : float
        ``max(birth, r_L)`` and ``death / 2`` for that candidate.
    """

    def __init__(self, message, candidate=None, lhs=None, rhs=None):
        super().__init__(message)
        self.candidate = candidate
        self.lhs = lhs
        self.rhs = rhs


class LiftFailureError(CircletError):
    """The centered-residue integer lift is not a cocycle over the integers."""

    def __init__(self, message, q=None, bad_triangles=None):
        super().__init__(message)
        self.q = q
        self.bad_triangles = bad_triangles


class ConvergenceError(CircletError, RuntimeError):
    """The iterative least-squares solve hit its iteration cap."""

    def __init__(self, message, relative_residual=None, iterations=None):
        super().__init__(message)
        self.relative_residual = relative_residual
        self.iterations = iterations
