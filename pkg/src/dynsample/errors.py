"""Exception hierarchy shared across the package."""


class DynsampleError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(DynsampleError):
    """Invalid user-supplied configuration (bounds, timesteps, counts...)."""


class DimensionError(DynsampleError):
    """Dimension outside the supported range or mismatched between arguments."""


class DegenerateInputError(DynsampleError):
    """Geometric input is affinely dependent / singular and cannot be processed."""


class EpochFailureError(DynsampleError):
    """An epoch produced no usable simulation results."""
