"""Exception types shared across the package."""


class NRThreatError(Exception):
    """Base class for every error raised by this package."""


class UnknownSpacing(NRThreatError, ValueError):
    pass


class UnsupportedCombination(NRThreatError, ValueError):
    pass


class ConfigConflict(NRThreatError, ValueError):
    pass


class InvalidId(NRThreatError, ValueError):
    pass


class InvalidRoot(NRThreatError, ValueError):
    pass


class LengthMismatch(NRThreatError, ValueError):
    pass


class TooShort(NRThreatError, ValueError):
    pass


class OddLength(NRThreatError, ValueError):
    pass


class SizeMismatch(NRThreatError, ValueError):
    pass


class NoThresholdInRange(NRThreatError, RuntimeError):
    pass


class ZeroFraction(NRThreatError, ValueError):
    pass


class NonPositiveDistance(NRThreatError, ValueError):
    pass


class EmptyEnvironment(NRThreatError, ValueError):
    pass


class ClockRegression(NRThreatError, ValueError):
    pass


class ConfigParse(NRThreatError, ValueError):
    """Raised for unreadable, malformed or semantically invalid config files."""
