"""Exception hierarchy shared by every module."""


class BiellipticError(Exception):
    """Base class for all errors raised by the package."""


class InputError(BiellipticError, ValueError):
    """Malformed or out-of-domain input (bad prime, singular curve, ...)."""


class SingularCurveError(InputError):
    pass


class UnsupportedPrimeError(InputError):
    """Local analysis requested at a prime the routine does not handle (p < 5)."""


class PreconditionError(BiellipticError):
    """An operation was called on data violating its documented precondition.

    ``subject`` names the offending object (usually a curve label) when known.
    """

    def __init__(self, message, subject=None, citation=None):
        super().__init__(message)
        self.subject = subject
        self.citation = citation


class ResourceError(BiellipticError):
    """Requested enumeration exceeds the configured bound."""


class ScriptParseError(BiellipticError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
