class GeoeconError(Exception):
    """Base class for all package errors."""


class IngestError(GeoeconError, ValueError):
    """Malformed or invalid input data."""


class SpecializationError(GeoeconError, ValueError):
    pass


class ComplexityError(GeoeconError, ValueError):
    pass


class DegenerateSpectrumError(ComplexityError):
    """The second eigenvalue is repeated, so its eigenvector is not unique."""


class ConvergenceError(ComplexityError):
    pass


class StrategyError(GeoeconError, ValueError):
    pass
