"""Exception hierarchy shared across the package.

Everything raised on purpose derives from :class:`DckError`, so callers
(including the CLI) can distinguish expected geometric/domain failures
from genuine bugs.
"""


class DckError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateTriangle(DckError):
    """Edge lengths do not bound a nondegenerate triangle in the model."""


class DegenerateFace(DckError):
    """One or more mesh faces fail the triangle validity checks."""

    def __init__(self, message, faces=()):
        super().__init__(message)
        self.faces = tuple(faces)


class NonManifold(DckError):
    """Face list is not a closed triangulated surface."""


class DuplicateFace(DckError):
    """The same oriented face appears more than once."""


class OutOfDomain(DckError):
    """Conformal parameters leave the structure's admissible domain."""


class SphericalCenterUndefined(DckError):
    """A spherical partial length has cos(d) = 0, so no center exists."""


class LightlikeCenter(DckError):
    """A hyperbolic face center degenerated onto the light cone."""


class ZeroHeight(DckError):
    """A spacelike-center height vanished; its cotangent is singular."""


class IllConditioned(DckError):
    """A linear system was too ill-conditioned to solve reliably."""


class EvaluationFailed(DckError):
    """A finite-difference probe point could not be evaluated."""


class PathLeavesDomain(DckError):
    """An integration path left the valid conformal domain."""

    def __init__(self, message, parameter=None):
        super().__init__(message)
        self.parameter = parameter


class SolverFailure(DckError):
    """Base class for prescribed-curvature solver failures."""


class IterationLimit(SolverFailure):
    """Newton iteration budget exhausted before convergence."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class LineSearchFailed(SolverFailure):
    """Backtracking could not find an admissible step."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class SingularHessian(SolverFailure):
    """Curvature Jacobian is singular / not positive definite."""


class InfeasibleTarget(SolverFailure):
    """Prescribed curvature target violates the total-curvature identity."""


class SchemaError(DckError):
    """Surface file fails to parse or violates the input schema."""
