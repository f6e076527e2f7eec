"""Exception types shared across the package."""


class DomainError(ValueError):
    """Coordinate lies outside the geometric domain."""


class ConfigError(ValueError):
    """Invalid configuration or parameter combination."""


class InputError(ValueError):
    """Field data violates an operation's preconditions."""


class GeometryError(ValueError):
    """Degenerate geometry (non-positive metric determinant, bad chart)."""


class FitError(RuntimeError):
    """Rate fit is impossible (too few usable data points)."""


class StepSizeError(RuntimeError):
    """Time step violates a stability constraint."""


class BlowUpError(RuntimeError):
    """Solution magnitude grew beyond the abort threshold."""
