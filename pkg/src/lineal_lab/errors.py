"""Exception types shared across the lab."""


class LabError(Exception):
    """Base class for every error raised by lineal_lab."""


class ResolutionError(LabError):
    """A level finer than the backing resolution was requested."""


class CapacityError(LabError):
    """Materialization would exceed the cell cap."""


class ConfigError(LabError):
    """Malformed parameters, windows, or configuration files."""


class InconsistencyError(LabError):
    """Input data contradicts the rule it claims to follow."""


class DecodeError(LabError):
    """A schedule and a bit string do not fit together."""


class RangeError(LabError):
    """A formula parameter is outside its declared range."""


class FormatError(LabError):
    """A DYSET/KPROF text record could not be parsed."""
