"""Exception types shared across the simulator."""


class TeaError(Exception):
    """Base class for all simulator errors."""


class ConfigError(TeaError):
    """Input data or configuration is unusable. Maps to CLI exit status 1."""


class ParseError(ConfigError):
    """Malformed input file, unknown key or unreadable row."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class ValidationError(ConfigError):
    """A value parsed fine but violates a domain invariant."""


class NonPositiveInput(TeaError, ValueError):
    pass


class InvalidBeamwidth(TeaError, ValueError):
    pass


class InvalidElevation(TeaError, ValueError):
    pass


class NoVisibleSatellite(TeaError):
    pass


class ZeroFootprint(TeaError, ValueError):
    pass


class ZeroDensity(TeaError, ValueError):
    pass


class NonPositiveCapacity(TeaError, ValueError):
    pass


class ZeroSubscribers(TeaError, ValueError):
    pass
