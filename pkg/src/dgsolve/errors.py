"""Exception hierarchy shared by every dgsolve module."""


class DgsolveError(Exception):
    """Base class for all errors raised by dgsolve."""


class DimensionMismatch(DgsolveError, ValueError):
    pass


class NotSpd(DgsolveError, ValueError):
    """Matrix is not symmetric, or its Cholesky factorization failed."""


class Singular(DgsolveError, ArithmeticError):
    pass


class InvalidPartition(DgsolveError, ValueError):
    pass


class SingularBlock(Singular):
    pass


class InvalidStepsize(DgsolveError, ValueError):
    pass


class OutOfRange(DgsolveError, ValueError):
    pass


class InvalidSpec(DgsolveError, ValueError):
    """Method/preconditioner combination that the scheme does not support."""


class Unsupported(DgsolveError):
    pass


class ParseError(DgsolveError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class UnsupportedField(ParseError):
    pass
