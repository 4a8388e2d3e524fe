"""Exception types raised across the package."""


class SimulationError(Exception):
    """Base class for package errors."""


class CapacityError(SimulationError):
    """Sector enumeration exceeded the configured size cap."""


class IntegrationError(SimulationError):
    """Norm drift during propagation exceeded the failure threshold."""


class DegenerateDarkSpaceError(SimulationError):
    """The dark subspace is empty or has more than one dimension."""


class UndefinedStateError(SimulationError):
    """A closed-form state has all coefficients zero."""


class ImpossibleOutcomeError(SimulationError):
    """A projection outcome has (numerically) zero probability."""


class ConfigError(SimulationError, ValueError):
    """Invalid scenario configuration."""
