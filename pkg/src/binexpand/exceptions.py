"""Exception types raised by binexpand."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class NumericalError(ArithmeticError):
    """A quadrature or root-finding routine failed to reach its tolerance.

    Attributes
    ----------
    interval : tuple of float or None
        The integration interval (lo, hi) on which the failure occurred.
    """

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval
