"""Exception types shared across the package."""


class LocalP2Error(Exception):
    """Base class for all package errors."""


class BasisError(LocalP2Error):
    """Unknown K-theory basis tag, or no registered change of basis."""


class PoleError(LocalP2Error):
    """Special function evaluated at (or too close to) a pole."""


class BranchCutError(LocalP2Error):
    """Argument lies on a branch cut where the requested value is ambiguous."""


class ConvergenceError(LocalP2Error):
    """An iteration (AGM, series tail, ODE step control) failed to converge."""


class DomainError(LocalP2Error):
    """Input outside the documented domain of an operation."""


class RootCollisionError(LocalP2Error):
    """Two fiber roots collide away from a declared degeneration point."""


class QuadratureError(LocalP2Error):
    """Adaptive quadrature failed to reach the requested tolerance."""


class MonodromyError(LocalP2Error):
    """Transported monodromy matrix is not integral within tolerance."""


class IntegralityError(LocalP2Error):
    """A quantity that must be an integer (HRR pairing, fitted matrix entry) is not."""


class FitError(LocalP2Error):
    """Transfer-matrix fit residual exceeds the documented threshold."""
