"""Exception hierarchy shared by every module."""


class ZetaBoundError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ZetaBoundError, ValueError):
    """Argument lies outside the region where an operation is defined."""


class EmptyTableError(DomainError):
    pass


class PoleProximityError(DomainError):
    """Evaluation point too close to the pole of zeta at s = 1."""


class RedirectError(DomainError):
    """The request belongs to a different solver.

    ``target`` names the operation that should be called instead.
    """

    def __init__(self, message, target):
        super().__init__(message)
        self.target = target


class PrecisionEscalationError(ZetaBoundError):
    """A sign or floor could not be certified at the working precision.

    ``required_digits`` is a suggested precision for a retry.
    """

    def __init__(self, message, required_digits):
        super().__init__(message)
        self.required_digits = required_digits


class NoRootError(ZetaBoundError):
    pass


class OutOfRegionError(NoRootError):
    pass


class DependentRowsError(ZetaBoundError, ValueError):
    pass


class NoSentinelRowError(ZetaBoundError):
    pass


class ZeroOnContourError(ZetaBoundError):
    pass


class NoTurningPointError(NoRootError):
    pass
