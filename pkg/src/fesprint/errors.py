"""Exception types raised across the package.

Everything derives from :class:`FesError`, so callers that only care about
"bad input" can catch that. Most also derive from ``ValueError`` or
``LookupError`` so that generic handlers keep working.
"""


class FesError(Exception):
    """Base class for all package errors."""


class ParseError(FesError, ValueError):
    """A data file contained a row that could not be parsed.

    ``line`` is the 1-based line number in the file.
    """

    def __init__(self, line, message=None):
        self.line = line
        super().__init__(message or f"could not parse line {line}")


class EmptyInput(FesError, ValueError):
    pass


class InvalidRate(FesError, ValueError):
    pass


class InvalidSeries(FesError, ValueError):
    """Samples are non-finite or otherwise unusable."""


class TooShort(FesError, ValueError):
    pass


class InvalidConfig(FesError, ValueError):
    pass


class EmptyBand(FesError, ValueError):
    pass


class InvalidBand(FesError, ValueError):
    pass


class OutOfRange(FesError, ValueError):
    pass


class NonpositivePsd(FesError, ValueError):
    pass


class PartitionMismatch(FesError, ValueError):
    pass


class KindMismatch(FesError, ValueError):
    pass


class ToleranceMismatch(FesError, ValueError):
    pass


class TooFew(FesError, ValueError):
    pass


class InvalidSpec(FesError, ValueError):
    pass


class BandExceedsNyquist(FesError, ValueError):
    pass


class DuplicateLabel(FesError, ValueError):
    pass


class NotFound(FesError, LookupError):
    pass


class StorageError(FesError, OSError):
    pass
