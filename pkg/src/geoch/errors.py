"""Exception types shared across the package."""


class GeochError(Exception):
    """Base class for errors raised by geoch."""


class SizeError(GeochError, ValueError):
    """A sample space or vertex set would exceed the enumeration cap."""


class SpaceMismatchError(GeochError, ValueError):
    """Events or measures from different sample spaces were combined."""


class UnknownInequalityError(GeochError, KeyError):
    """The requested inequality is not in the catalog or not supported."""


class NumericalError(GeochError, ArithmeticError):
    """An eigensolver or optimizer failed to converge, or a scan was ambiguous."""

    def __init__(self, message, scan=None):
        super().__init__(message)
        self.scan = scan
