"""Exception hierarchy shared across the library."""


class GaitStabError(Exception):
    """Base class for all library-specific errors."""


class RankDeficientConstraint(GaitStabError):
    """Contact constraint Jacobian (or its Gram matrix) lost row rank."""

    def __init__(self, msg, smallest_singular_value=None):
        super().__init__(msg)
        self.smallest_singular_value = smallest_singular_value


class SingularMassMatrix(GaitStabError):
    pass


class UnknownVertex(GaitStabError):
    pass


class GuardNotReached(GaitStabError):
    """Integration hit the time limit before the guard crossed zero."""


class ZenoSuspected(GaitStabError):
    """Guard crossing located before the minimum dwell time elapsed."""


class IntegrationFailure(GaitStabError):
    pass


class DecouplingSingular(GaitStabError):
    """Decoupling matrix is rank deficient for the requested output set."""

    def __init__(self, msg, singular_values=None):
        super().__init__(msg)
        self.singular_values = singular_values


class NonMonotonePhase(UserWarning):
    """Phasing variable stopped increasing strictly inside a domain."""


class NoConvergence(GaitStabError):
    def __init__(self, msg, residual=None, iterations=None):
        super().__init__(msg)
        self.residual = residual
        self.iterations = iterations


class FitToleranceExceeded(GaitStabError):
    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class StepFailure(GaitStabError):
    """A finite-difference probe left the basin of the underlying map."""


class EigenFailure(GaitStabError):
    pass


class DimensionMismatch(GaitStabError):
    pass


class Infeasible(GaitStabError):
    """The matrix-inequality problem admits no solution at the required margin."""


class NumericalFailure(GaitStabError):
    pass


class MissingArtifact(GaitStabError):
    pass


class SimulationError(GaitStabError):
    """Wraps an error raised mid-execution, carrying the partial log."""

    def __init__(self, msg, vertex=None, step_index=None, partial=None, cause=None):
        super().__init__(msg)
        self.vertex = vertex
        self.step_index = step_index
        self.partial = partial
        self.cause = cause
