"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`GsnIcaError`,
and the CLI maps the two families below onto exit codes.
"""


class GsnIcaError(Exception):
    """Base class for all package errors."""


class DataError(GsnIcaError, ValueError):
    """Problem with the numbers themselves (CLI exit code 3)."""


class SingularMatrix(DataError):
    pass


class InsufficientData(DataError):
    pass


class DegenerateData(DataError):
    pass


class DegenerateProjection(DataError):
    """All samples fall on one side of some component hyperplane."""


class NonFiniteObjective(DataError):
    pass


class ZeroVector(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class FormatError(GsnIcaError, ValueError):
    """Problem reading or writing a file."""


class ParseError(FormatError):
    def __init__(self, message, row=None, column=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.column = column


class RaggedRows(ParseError):
    pass


class UnsupportedFormat(FormatError):
    pass


class SizeMismatch(FormatError):
    pass


class SchemaMismatch(FormatError):
    pass
