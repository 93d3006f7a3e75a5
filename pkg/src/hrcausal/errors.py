"""Exception types shared across the package.

Invalid arguments (bad flags, out-of-range parameters) raise the builtin
``ValueError``; the classes below cover problems with the data itself and
numerical breakdowns, so callers (and the CLI exit-code mapping) can tell
the three apart.
"""


class DataError(Exception):
    """Base class for malformed, insufficient, or degenerate input data."""


class ParseError(DataError):
    """A file could not be parsed; the message names the offending row."""


class InsufficientDataError(DataError):
    """Too few samples for the requested operation."""


class DegenerateDataError(DataError):
    """A constant or otherwise degenerate series where variation is required."""


class IncompatibleGraphsError(DataError):
    """Two graphs do not share the variable set / tau_max needed to compare them."""


class IncompatibleTablesError(DataError):
    """Sweep tables do not share the same kind and parameter grid."""


class NumericalError(Exception):
    """A numerical routine failed beyond recovery (e.g. Cholesky after jitter)."""
