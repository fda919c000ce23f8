"""Exception types raised by the solvers."""


class FlatbandError(ValueError):
    """Base class for all errors raised by this package."""


class SingularEnergyError(FlatbandError):
    """Energy sits on (or too close to) a pole/branch point of the quantity requested."""


class DomainError(FlatbandError):
    """Arguments fall outside the region where a characteristic function is defined."""


class ThresholdError(FlatbandError):
    """Energy sits exactly on a continuum threshold ``E = +/- m``."""


class ZeroStrengthError(FlatbandError):
    """A vanishing potential strength was given where a bound state is requested."""


class ConfigError(FlatbandError):
    """Invalid lattice or solver configuration."""
