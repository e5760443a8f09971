"""Exception hierarchy shared by all simulator modules."""


class OamSatError(Exception):
    """Base class for all simulator errors."""


class ConfigError(OamSatError):
    """Configuration file could not be parsed or is missing required keys."""


class ValidityError(OamSatError):
    """Inputs violate a physical validity bound (geometry, zenith angle, ...)."""


class TurbulenceFreeChannelError(ValidityError):
    """The integrated turbulence strength underflows; the channel is vacuum-like."""


class NumericalError(OamSatError):
    """A numerical routine failed to reach its accuracy target."""


class QuadratureConvergenceError(NumericalError):
    """Adaptive quadrature did not converge within its node budget."""


class GridResolutionError(NumericalError):
    """Detection grid too coarse: refining it changes reported probabilities."""
