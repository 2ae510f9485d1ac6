"""Exception types shared across the toolkit."""


class FicError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(FicError):
    """Invalid or inconsistent configuration."""


class DimensionError(FicError):
    """Shape or length mismatch between operands."""


class EmptyInputError(FicError):
    """An operation received an empty matrix or vector."""


class InsufficientDataError(FicError):
    """Not enough rows (or distinct rows) for the requested operation."""


class DegenerateClusterError(FicError):
    """A closed-form center update was invoked on an empty cluster."""


class DataError(FicError):
    """Base class for dataset ingestion failures."""


class MissingFileError(DataError):
    """Input file does not exist."""


class ParseError(DataError):
    """Input file could not be parsed."""


class NonFiniteValueError(DataError):
    """A matrix or file contains NaN or infinite entries."""


class ColumnMismatchError(DataError):
    """Column layout disagrees with the declared feature split."""
