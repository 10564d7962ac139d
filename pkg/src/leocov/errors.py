"""Exception types shared across the package."""


class ConfigError(Exception):
    """Raised when a configuration file or scenario definition is invalid."""


class NumericalError(RuntimeError):
    """Raised when a numerical routine cannot produce a trustworthy result."""


class QuadratureError(NumericalError):
    """Raised when adaptive quadrature fails to reach the requested tolerance.

    Carries the tolerance actually achieved so callers can report how far
    off the integration ended up.
    """

    def __init__(self, message: str, achieved_tolerance: float = float("nan")):
        super().__init__(message)
        self.achieved_tolerance = achieved_tolerance
