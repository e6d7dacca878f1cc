"""Exception hierarchy shared by all gentess modules."""


class GentessError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(GentessError):
    """Invalid input: bad parameters, malformed documents, broken meshes."""


class NumericalError(GentessError):
    """A numerical procedure failed: singular system, proxy accuracy, determinant floor."""


class RankAmbiguousError(NumericalError):
    """Singular values straddle the rank threshold; the result is inconclusive."""
