"""Exception hierarchy shared across the laboratory."""


class LabError(Exception):
    """Base class for all kplab errors."""


class ConfigError(LabError):
    """Invalid or inconsistent run configuration."""


class LatticeError(LabError):
    """An exponent fell off the configured exponent lattice."""


class PoleError(LabError):
    """A parameter choice hits a pole (q^k = 1 and the like)."""


class NotInvertibleError(LabError):
    """Inversion requested for a non-invertible element."""


class BackendError(LabError):
    """Operation not supported by the coefficient backend in use."""


class WindowError(LabError):
    """Grid access outside the validity window, or an empty window."""


class BetaDegreeError(LabError):
    """Formal beta degree exceeded the configured cap."""
