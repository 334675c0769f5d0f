"""Shared exception types for the monitoring pipeline."""


class SSTLError(Exception):
    """Base class for all package-specific errors."""


class GraphError(SSTLError):
    """Invalid space model input (bad weight, unknown or duplicate location)."""


class SchemaError(SSTLError):
    """A formula references a variable the trace does not provide."""


class HorizonError(SSTLError):
    """The formula's temporal depth exceeds the available trace horizon."""


class GridMismatchError(SSTLError):
    """Two quantitative signals live on incompatible time grids."""


class EqualityAtomError(SSTLError):
    """Equality atoms have no robustness degree; quantitative mode rejects them."""


class TraceFormatError(SSTLError):
    """Malformed trace file (missing cells, ragged grid, unknown location)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class IntegrationError(SSTLError):
    """Numerical blow-up during trace generation."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time
