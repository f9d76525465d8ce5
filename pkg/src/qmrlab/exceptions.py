"""Exception types raised across qmrlab."""


class QmrError(Exception):
    """Base class for all qmrlab errors."""


class BoundError(QmrError, ValueError):
    """A size parameter (candidate count, dimension, support product) is out of range."""


class InvalidRankingError(QmrError, ValueError):
    """Input is not a permutation of the alternatives."""


class InvalidLabelError(QmrError, ValueError):
    """A qubit label or index does not encode a ranking (value >= m!)."""


class ParameterError(QmrError, ValueError):
    """A constitution parameter violates its admissible range."""


class DegeneracyError(QmrError, ArithmeticError):
    """A renormalization step has (numerically) zero mass."""


class EmptySampleError(QmrError, RuntimeError):
    """Every shot of a sampling run was discarded."""


class ConfigError(QmrError, ValueError):
    """An experiment configuration failed validation.

    ``path`` names the offending field, e.g. ``"profile[2]"``.
    """

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)
