"""Exception hierarchy shared by all modules."""


class ResponseError(Exception):
    """Base class for errors raised by nlresponse."""


class DomainError(ResponseError, ValueError):
    """Argument outside the mathematical domain (e.g. negative time)."""


class TableRangeError(ResponseError, ValueError):
    """Evaluation requested outside a tabulated correlation function."""


class TableFormatError(ResponseError, ValueError):
    """Malformed tabulated input (non-uniform axis, bad header, mixed units)."""


class UnsupportedPathwayError(ResponseError, ValueError):
    """The requested formula is not defined for this pathway."""


class GridError(ResponseError, ValueError):
    """Time or frequency grid misconfiguration."""


class WindowingError(ResponseError, ValueError):
    """Spectral peak touches the map boundary."""


class AmbiguousPeakError(ResponseError, ValueError):
    """Spectral map has more than one global maximum."""


class ConfigError(ResponseError, ValueError):
    """Invalid experiment configuration."""
