"""Exception hierarchy shared by all modules."""


class KmrGlueError(Exception):
    """Base class for library errors."""


class DomainError(KmrGlueError, ValueError):
    """An argument lies outside the domain of a function."""


class BranchPointError(DomainError):
    """Evaluation requested at a branch point of the Gauss map."""


class OrthogonalityError(DomainError):
    """Boundary data violates a declared orthogonality or parity constraint."""


class ScaleError(DomainError):
    """A smallness precondition on the parameters fails."""


class ResolutionError(KmrGlueError, RuntimeError):
    """A discretization is too coarse for the requested guarantee."""


class ConvergenceError(KmrGlueError, RuntimeError):
    """An iterative solver failed to converge.

    Attributes
    ----------
    trace : list
        Per-iteration diagnostic records collected before failure.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class TrustRegionError(ConvergenceError):
    """Iterates left the admissible ball of radius ``k * eps``."""
