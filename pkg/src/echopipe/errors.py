"""Exception types shared across the toolkit."""


class EchoPipeError(Exception):
    """Base class for all toolkit errors."""


class AudioDecodeError(EchoPipeError):
    """Raised when a byte stream is not a well-formed RIFF/WAVE container."""


class UnsupportedFormatError(EchoPipeError):
    """Raised for well-formed WAVE files in an encoding we do not handle."""


class AudioTooShortError(EchoPipeError):
    """Raised when a clip is shorter than the minimum analysis length."""


class ParameterError(EchoPipeError):
    """Raised for out-of-range arguments, size mismatches, and bad lookups."""


class DegenerateTrajectoryError(EchoPipeError):
    """Raised when a trajectory or speed profile carries no usable motion."""


class SchemaError(EchoPipeError):
    """Raised when a JSONL file's schema header is missing or incompatible."""
