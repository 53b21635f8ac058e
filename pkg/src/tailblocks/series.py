"""Sample container and preparation (validation, demeaning)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Tolerance for the "mean is zero" check, relative to the data magnitude.
DEMEAN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """An ordered sample of finite real observations.

    ``values`` is stored as a 1-d float64 array. ``demeaned`` records whether
    the sample mean has been subtracted; when set, the stored mean must be
    within ``DEMEAN_TOL * (max|value| + 1)`` of zero. ``source`` is free-form
    provenance (file path, process name).
    """

    values: np.ndarray
    demeaned: bool = False
    source: str | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("expected a one-dimensional sample")
        if values.size == 0:
            raise ValueError("empty sample")
        if not np.all(np.isfinite(values)):
            raise ValueError("sample contains NaN or infinite values")
        object.__setattr__(self, "values", values)
        if self.demeaned:
            bound = DEMEAN_TOL * (float(np.max(np.abs(values))) + 1.0)
            if abs(float(np.mean(values))) > bound:
                raise ValueError("demeaned flag set but sample mean is not near zero")

    @property
    def n(self) -> int:
        return int(self.values.size)


def as_series(x) -> TimeSeries:
    """Coerce an array-like (or pass through a TimeSeries) to a TimeSeries."""
    if isinstance(x, TimeSeries):
        return x
    return TimeSeries(values=x)


def demean(x) -> TimeSeries:
    """Subtract the sample mean from every observation.

    Idempotent up to floating point: demeaning an already-demeaned series
    changes values by at most ~1e-12 relative to the data magnitude.
    """
    series = as_series(x)
    centred = series.values - np.mean(series.values)
    return TimeSeries(values=centred, demeaned=True, source=series.source)
