"""Exception hierarchy shared by the library and the command-line front end."""


class QMeasureError(Exception):
    """Base class for all errors raised by :mod:`qmeasure`."""


class ConfigError(QMeasureError):
    """A scenario file could not be parsed."""


class PreconditionError(QMeasureError, ValueError):
    """An input violates the documented precondition of an operation."""


class DivergentSpectrumError(PreconditionError):
    """The requested spectral exponent makes the decoherence integral diverge."""


class UnsupportedSpectrumError(PreconditionError):
    """A closed form was requested for a spectral family it does not cover."""


class ConvergenceError(QMeasureError):
    """The Fock-space oracle did not converge within its cutoff budget.

    Attributes
    ----------
    best : object
        Best estimate available when the budget ran out (may be ``None``).
    delta : float
        Change between the last two cutoff levels.
    suggested_cutoff : int or None
        Cutoff that would satisfy the failed requirement, when known.
    """

    def __init__(self, message, best=None, delta=float("nan"), suggested_cutoff=None):
        super().__init__(message)
        self.best = best
        self.delta = delta
        self.suggested_cutoff = suggested_cutoff
