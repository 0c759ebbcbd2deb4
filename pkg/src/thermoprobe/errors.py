"""Exception types shared across the package."""


class ThermoprobeError(Exception):
    """Base class for all library errors."""


class PhysicsError(ThermoprobeError, ValueError):
    """Input describes an unphysical or unsupported regime."""


class NumericalError(ThermoprobeError, RuntimeError):
    """A numerical procedure failed or lost accuracy."""


class FitError(NumericalError):
    """Lorentzian fitting could not be performed."""
