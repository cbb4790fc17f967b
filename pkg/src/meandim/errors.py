"""Exception types raised by meandim."""


class MeandimError(Exception):
    """Base class for all errors raised by this package."""


class BudgetExceededError(MeandimError):
    """A configured size budget (points, candidate sets, search nodes) was exceeded."""


class InvalidQueryError(MeandimError, ValueError):
    pass


class NonMonotoneContentError(MeandimError):
    """Raised when a set diameter above 1 would break monotonicity in the exponent."""


class InsufficientGridError(MeandimError, ValueError):
    pass


class SupportError(MeandimError, ValueError):
    pass


class DegenerateMarkersError(MeandimError, ValueError):
    pass


class NoMarkerError(MeandimError):
    pass


class UncertifiedWindowError(MeandimError):
    pass


class ConfigError(MeandimError, ValueError):
    pass
