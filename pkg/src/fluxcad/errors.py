"""Exception hierarchy for fluxcad.

Exceptions fall into three groups that the CLI maps onto exit codes:
configuration errors (exit 2), numeric failures (exit 3), and
model-domain errors such as requesting an unstable bias point (exit 4).
"""


class FluxcadError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(FluxcadError):
    """Malformed or inconsistent configuration input."""


# --- numeric failures -------------------------------------------------------

class NumericError(FluxcadError):
    """A numerical procedure failed to converge or became degenerate."""


class NoConvergence(NumericError):
    """Root refinement failed to reach the requested tolerance."""


class MaxIterations(NumericError):
    """An iterative solver hit its iteration cap before converging."""


class SingularJacobian(NumericError):
    """Fit Jacobian is numerically singular (parameter degeneracy).

    Carries the offending unit direction in parameter space.
    """

    def __init__(self, message, direction=None):
        super().__init__(message)
        self.direction = direction


class ModelEvalFailure(NumericError):
    """A trial parameter set could not be evaluated at some data points."""


# --- model-domain errors ----------------------------------------------------

class DomainError(FluxcadError):
    """Request lies outside the physical domain of the model."""


class UnstableBranch(DomainError):
    """Operation requires a stable potential minimum."""


class WellTooShallow(DomainError):
    """Metastable well holds fewer bound levels than required."""


class OnResonance(DomainError):
    """Qubit and cavity are hybridized; dispersive formulas invalid."""


class OutOfRange(DomainError):
    """Requested frequency lies outside the tunable band."""


class ZeroDetuning(DomainError):
    """Dispersive shift is undefined at zero qubit-cavity detuning."""


class StraddlingBoundary(DomainError):
    """Detuning sits exactly on the pole of the three-level shift."""


class SingleBranch(DomainError):
    """Two coexisting flux states required but only one branch found."""


class EmptyGrid(DomainError):
    """An optimization or sweep grid contains no points."""


class HybridizedSegment(DomainError):
    """A schedule segment violates the dispersive-regime requirement."""


class UnstableBias(DomainError):
    """Tracked flux branch vanished (step edge crossed)."""


class InsufficientSpan(DomainError):
    """Data span too short for the requested calibration."""
