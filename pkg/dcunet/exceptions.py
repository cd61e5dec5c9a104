"""exceptions.py

Custom warnings and exceptions raised internally.
"""


class ShapeMismatchError(ValueError):
    pass


class UnsupportedConfigurationError(ValueError):
    pass


class InvalidArgumentsError(ValueError):
    pass


class GraphError(RuntimeError):
    pass


class NumericalError(ArithmeticError):
    pass


class DivergenceError(NumericalError):
    pass


class DataError(Exception):
    pass


class InvalidImageError(DataError):
    pass


class ManifestError(DataError):
    pass


class InvalidCheckpointError(DataError):
    pass


class PerformanceWarning(UserWarning):
    pass
