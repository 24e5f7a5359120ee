"""Exception hierarchy shared across the package."""


class KKError(Exception):
    """Base class for all package errors."""


class InvalidInputError(KKError, ValueError):
    """Malformed or mismatched arguments (wrong group, too few samples, ...)."""


class ChartDomainError(KKError, ValueError):
    """Point outside the declared chart domain (metric chart or exp chart)."""


class GeometryError(KKError):
    """Degenerate metric or other geometric failure."""


class ScenarioError(KKError, ValueError):
    """Unknown scenario name or invalid scenario parameters."""


class IntegrationError(KKError, RuntimeError):
    """ODE integration failed (step underflow, non-finite state, ...)."""


class LiftError(KKError, RuntimeError):
    """Geodesic lift failed (non-finite fiber, invalid base trajectory)."""


class RejectedSegmentError(KKError, ValueError):
    """Segment fails a hard classifier precondition (e.g. not timelike)."""


class ConfigError(KKError, ValueError):
    """Run configuration is malformed."""
