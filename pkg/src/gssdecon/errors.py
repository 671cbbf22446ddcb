"""Exception hierarchy for gssdecon."""


class GssDeconError(Exception):
    """Base class for all gssdecon errors."""


class DegenerateWeightError(GssDeconError):
    """Error characteristic function underflowed; division is meaningless."""


class InsufficientDataError(GssDeconError):
    """Operation needs more observations than were supplied."""


class UnsupportedOrderError(GssDeconError):
    """Moment order exceeds what the model tabulates."""


class QuadratureError(GssDeconError):
    """A numerical integral came out non-finite."""


class TailUndefinedError(GssDeconError):
    """Skewing-function evaluation requested where the base density underflows."""


class PhaseUndefinedError(GssDeconError):
    """Empirical characteristic function modulus too small to define a phase."""


class SignalVarianceError(GssDeconError):
    """Sample variance does not exceed the error variance; no signal left."""


class EstimationFailureError(GssDeconError):
    """No optimizer start converged to a usable solution."""
