"""Exception hierarchy shared by all modules."""


class MisoDofError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(MisoDofError, ValueError):
    """Array shapes do not fit the operation (e.g. fewer than 2 antennas)."""


class DegenerateDirectionError(MisoDofError, ValueError):
    """A direction was requested from a zero vector."""


class DomainError(MisoDofError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class ContractError(MisoDofError, ValueError):
    """Inputs violate a documented precondition."""


class NumericError(MisoDofError, ArithmeticError):
    """Non-finite values reached a numerical routine."""


class CodecFormatError(MisoDofError, ValueError):
    """A bit string does not have the layout expected by the codec."""


class ConfigError(MisoDofError, ValueError):
    """Invalid simulation configuration, raised before any trial runs."""


class EstimationError(MisoDofError, ValueError):
    """Not enough data to fit a slope."""
