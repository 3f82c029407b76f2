"""
Error types shared by every package.
Single Responsibility: one hierarchy so the command line can map failures to exit codes.
"""


class IdlabError(Exception):
    """Base class for all lab errors."""


class InputError(IdlabError, ValueError):
    """A precondition on the caller's input does not hold."""


class ConfigurationError(InputError):
    """Environment or run configuration cannot be used."""


class NumericalError(IdlabError, RuntimeError):
    """A numerical stage failed on valid input."""


class QuadratureError(NumericalError):
    """Quadrature did not converge below the order cap."""


class KernelMassError(NumericalError):
    """The discretized index density loses too much mass off the v grid."""


class SolverError(NumericalError):
    """The regularized linear solve cannot proceed."""


class IdentificationError(NumericalError):
    """Coefficient or payoff recovery produced an inconsistent answer."""


class DetectionError(NumericalError):
    """No level crossing could be located on the grid."""


class MonotonicityError(NumericalError):
    """A recovered CDF violates monotonicity beyond tolerance."""
