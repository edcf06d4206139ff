"""Exception hierarchy shared by the library and the CLI.

The CLI maps each family onto an exit code, so new errors should subclass
the closest family rather than :class:`RangeCoderError` directly.
"""


class RangeCoderError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(RangeCoderError, ValueError):
    """Invalid model or coder configuration (bad K, M, or method combination)."""


class ScalingError(ConfigError):
    """Static counts cannot be scaled to the requested total."""


class DataError(RangeCoderError, ValueError):
    """Input symbols are inconsistent with the alphabet or the model."""


class SymbolRangeError(DataError, IndexError):
    """A symbol index or code value lies outside its valid range."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class UnencodableSymbolError(DataError):
    """The model assigns a zero count to a symbol that must be coded."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class MetricError(DataError):
    """A metric is undefined for the given inputs (e.g. zero entropy)."""


class InvariantError(RangeCoderError):
    """An internal model invariant would be violated."""


class CapacityError(InvariantError):
    """A decode table is too small for the current total count."""


class StreamError(RangeCoderError):
    """Base class for problems with a compressed or raw-symbol stream."""


class FormatError(StreamError):
    """Bad magic, unsupported version or malformed header."""


class HeaderError(FormatError):
    """Header fields are individually valid but mutually infeasible."""


class TruncatedStreamError(StreamError):
    """The payload ended before all symbols were decoded."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class CorruptStreamError(StreamError):
    """Payload bytes do not correspond to any valid encoder output."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position
