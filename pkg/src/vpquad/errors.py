"""Exception hierarchy.

The CLI maps these onto exit codes: ``ValueError`` (including
:class:`EmptyRange`) is a validation failure, :class:`InfeasibleError`
subclasses mean the design cannot meet the request, and
:class:`NumericalError` subclasses mean a computation broke down.
"""


class VPQuadError(Exception):
    """Base class for all library errors."""


class InfeasibleError(VPQuadError):
    """The request is well formed but cannot be met by the design."""


class OutOfEnvelope(InfeasibleError):
    """Pitch or thrust lies outside the rotor's operating envelope."""


class NoSolution(InfeasibleError):
    """No parameter value within the admissible bracket satisfies the target."""


class OverweightError(InfeasibleError):
    """Vehicle mass exceeds the computed maximum take-off weight."""


class NumericalError(VPQuadError):
    """A numerical procedure failed."""


class ConvergenceError(NumericalError):
    """Bisection did not reach tolerance within the iteration budget."""


class SingularJacobian(NumericalError):
    """Control allocation Jacobian is (numerically) singular."""


class NumericalBlowup(NumericalError):
    """Simulation state diverged."""


class EmptyRange(VPQuadError, ValueError):
    """A sweep range has start greater than end."""


class StepNotFound(VPQuadError, ValueError):
    """The requested step is not contained in the log."""
