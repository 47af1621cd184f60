"""Exception hierarchy.

Every error raised on bad input derives from :class:`HypergraphError` so the
command-line layer can map it to a single "data error" exit code.
"""


class HypergraphError(ValueError):
    """Base class for all input and data errors raised by hyperlap."""


# structure
class EmptySideError(HypergraphError):
    pass


class OverlappingSidesError(HypergraphError):
    pass


class DuplicateHyperarcError(HypergraphError):
    pass


class NonpositiveWeightError(HypergraphError):
    pass


class VertexOutOfRangeError(HypergraphError):
    pass


class UnknownLabelError(HypergraphError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class LengthMismatchError(HypergraphError):
    pass


# operators
class ZeroDegreeVertexError(HypergraphError):
    pass


class POutOfRangeError(HypergraphError):
    pass


class ZeroFunctionError(HypergraphError):
    pass


class UnsupportedVariantError(HypergraphError):
    pass


# dynamics
class NotConvergedError(HypergraphError):
    """Raised by :meth:`FlowResult.check` when the iteration cap was hit."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class DegenerateInitialError(HypergraphError):
    pass


class EmptyInteriorError(HypergraphError):
    pass


# oracle
class TooLargeError(HypergraphError):
    pass


class NoConvergenceError(HypergraphError):
    pass


class SingularSystemError(HypergraphError):
    pass


# ingest
class MalformedLineError(HypergraphError):
    def __init__(self, line_number, line):
        super().__init__(f"line {line_number}: expected two tokens, got {line!r}")
        self.line_number = line_number
        self.line = line


class EmptyInputError(HypergraphError):
    pass


class UnknownLeaderError(HypergraphError):
    pass


class SchemaVersionMismatchError(HypergraphError):
    pass


class ParseError(HypergraphError):
    def __init__(self, message, location=None):
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location
