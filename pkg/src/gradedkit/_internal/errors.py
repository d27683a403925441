"""
Exception hierarchy for gradedkit

Mathematical failures are never raised: verifiers return FAIL checks. Exceptions are
reserved for malformed input and for calls that cannot be carried out.
"""


class GradedKitError(ValueError):
    """Base class for every error raised by gradedkit"""


class ShapeError(GradedKitError):
    """Mismatched rings, tables, ranks, degrees or degree bounds"""


class MissingValueError(GradedKitError):
    """A generator value, bracket entry or morphism component is absent"""


class NotExpressibleError(GradedKitError):
    """A derivation does not have the shape of a Chevalley-Eilenberg differential"""


class IterationCapError(GradedKitError):
    """A terminating series or recursion reached its hard cap"""


class KindMismatchError(GradedKitError):
    """A command was given a document of the wrong structure kind"""


class ParseError(GradedKitError):
    """Syntax or name-resolution error in a structure document"""

    def __init__(self, message: str, line: int, column: int, expected: tuple[str, ...] = ()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = expected
        detail = f"{message} at line {line}, column {column}"
        if expected:
            detail += f" (expected one of: {', '.join(expected)})"
        super().__init__(detail)
