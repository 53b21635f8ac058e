class EstimationError(RuntimeError):
    """Raised when an estimator cannot produce a value from the given data."""


class DataError(ValueError):
    """Raised when input data cannot be read or parsed."""
