"""Scaling functions: growth-rate law, asymptotic form, and the empirical slope.

For tail index alpha, the log of the partition function at block scale n^s
grows like ``rate(alpha, q, s) * ln n``. Regressing the observed log ratios
on s (with intercept) gives the empirical scaling function of q; as the
sample and the regression grid grow it converges to a closed-form limit
that bends at q = alpha, which is the basis of the tail-index estimator.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import EstimationError
from .partition import PartitionGrid, block_length, build_partition_grid
from .series import as_series

# Cells whose block count falls below this floor are left out of the
# scaling regression by default: with only a handful of blocks the average
# over blocks does no averaging, and the log of the few largest block sums
# biases the cell downward by an amount that grows with q. Set min_blocks=1
# to regress over every grid cell.
MIN_BLOCKS_DEFAULT = 5


@dataclass(frozen=True)
class RateParams:
    """Arguments of the growth-rate law: tail index, moment order, block exponent."""

    alpha: float
    q: float
    s: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.q > 0:
            raise ValueError(f"q must be positive, got {self.q}")
        if not 0 < self.s < 1:
            raise ValueError(f"s must lie in (0, 1), got {self.s}")


def _rate_formula(alpha: float, q: float, s):
    # s may be a scalar or array; alpha and q are assumed validated.
    # Ties resolve to the q <= alpha and alpha <= 2 branches (the law is
    # continuous across both boundaries, so this only fixes determinism).
    if alpha <= 2:
        if q <= alpha:
            return s * (q / alpha)
        return s + q / alpha - 1.0
    if q <= alpha:
        return s * (q / 2.0)
    return np.maximum(s + q / alpha - 1.0, s * (q / 2.0))


def rate_function(params: RateParams) -> float:
    """Growth exponent of the partition function at block scale n^s.

    Piecewise in (q, alpha): s*q/alpha for q <= alpha <= 2; s + q/alpha - 1
    for q > alpha, alpha <= 2; s*q/2 for q <= alpha, alpha > 2; and the
    maximum of the last two expressions when q > alpha > 2.
    """
    return float(_rate_formula(params.alpha, params.q, params.s))


def rate_curve(alpha: float, q: float, s_values) -> np.ndarray:
    """Vectorized growth exponents over an array of block exponents in (0, 1)."""
    s = np.asarray(s_values, dtype=np.float64)
    if not (alpha > 0 and q > 0):
        raise ValueError("alpha and q must be positive")
    if not (np.all(s > 0) and np.all(s < 1)):
        raise ValueError("block exponents must lie in (0, 1)")
    return np.asarray(_rate_formula(alpha, q, s), dtype=np.float64)


def asymptotic_scaling_function(alpha: float, q: float) -> float:
    """Closed-form limit of the empirical scaling function at moment order q.

    q/alpha below the breakpoint and 1 above it when alpha <= 2; q/2 below
    the breakpoint when alpha > 2, with a rational correction term beyond it.
    Ties resolve as in :func:`rate_function`.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not q > 0:
        raise ValueError(f"q must be positive, got {q}")
    if alpha <= 2:
        return q / alpha if q <= alpha else 1.0
    if q <= alpha:
        return q / 2.0
    # q > alpha > 2 forces q > 2, so the (2 - q)^2 denominator cannot vanish.
    assert q > 2, "unreachable: q > alpha > 2 implies q > 2"
    diff = alpha - q
    correction = 2.0 * diff * diff * (2.0 * alpha + 4.0 * q - 3.0 * alpha * q) / (
        alpha ** 3 * (2.0 - q) ** 2
    )
    return q / 2.0 + correction


def max_branch_kink(alpha: float, q: float) -> float | None:
    """Block exponent where the two max-branch expressions cross, or None.

    Defined (and always inside (0, 1)) exactly when q > alpha > 2.
    """
    if alpha > 2 and q > alpha:
        return 2.0 * (q - alpha) / (alpha * (q - 2.0))
    return None


def scaling_function_by_integration(alpha: float, q: float, num_points: int = 10_000) -> float:
    """Limit slope computed by quadrature instead of the closed form.

    Evaluates 12 * int_0^1 s*rate ds - 6 * int_0^1 rate ds, the continuum
    limit of the regression slope over s in (0, 1), by composite Simpson
    quadrature with ``num_points`` intervals per smooth piece. The kink of
    the max branch is located analytically and the integral split there, so
    the piecewise-linear integrand is handled exactly.
    """
    if not (alpha > 0 and q > 0):
        raise ValueError("alpha and q must be positive")
    if num_points < 100:
        raise ValueError(f"num_points must be at least 100, got {num_points}")
    kink = max_branch_kink(alpha, q)
    pieces = [(0.0, kink), (kink, 1.0)] if kink is not None else [(0.0, 1.0)]
    integral = 0.0
    weighted = 0.0
    for lo, hi in pieces:
        s = np.linspace(lo, hi, num_points + 1)
        rate = np.asarray(_rate_formula(alpha, q, s), dtype=np.float64)
        integral += simpson(rate, x=s)
        weighted += simpson(s * rate, x=s)
    return 12.0 * weighted - 6.0 * integral


def ols_slope(x: np.ndarray, y: np.ndarray) -> float:
    """Slope of the ordinary least-squares line (with intercept) of y on x."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    xc = x - x.mean()
    denom = float(np.dot(xc, xc))
    if denom == 0.0:
        raise EstimationError("zero regressor variance")
    return float(np.dot(xc, y - y.mean()) / denom)


def blocks_per_exponent(n: int, s_values) -> np.ndarray:
    """Number of complete blocks at each block exponent for a sample of size n."""
    return np.array([n // block_length(n, s) for s in np.asarray(s_values)], dtype=np.int64)


def empirical_scaling_function(
    grid: PartitionGrid, q_index: int, min_blocks: int = MIN_BLOCKS_DEFAULT
) -> float:
    """Regression slope of the grid row for one q against the block exponents.

    Invalid cells and cells with fewer than ``min_blocks`` blocks are
    skipped; at least two remaining cells are required.
    """
    if min_blocks < 1:
        raise ValueError(f"min_blocks must be at least 1, got {min_blocks}")
    y = grid.cells[q_index]
    mask = grid.valid[q_index] & (blocks_per_exponent(grid.n, grid.s_values) >= min_blocks)
    if int(mask.sum()) < 2:
        raise EstimationError(
            f"fewer than 2 usable grid cells for q={grid.q_values[q_index]:g}"
        )
    return ols_slope(grid.s_values[mask], y[mask])


@dataclass(frozen=True, eq=False)
class ScalingCurve:
    """Empirical scaling function values over a q grid.

    ``skipped_cells[i]`` counts grid cells excluded from the regression at
    ``q_values[i]`` because the partition function vanished there.
    """

    q_values: np.ndarray
    tau_hat: np.ndarray
    N: int
    n: int
    skipped_cells: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q_values, dtype=np.float64)
        tau = np.asarray(self.tau_hat, dtype=np.float64)
        skipped = np.asarray(self.skipped_cells, dtype=np.int64)
        if q.shape != tau.shape or q.shape != skipped.shape:
            raise ValueError("q_values, tau_hat and skipped_cells must have equal length")
        if not (np.all(q > 0) and np.all(np.diff(q) > 0)):
            raise ValueError("q_values must be strictly increasing and positive")
        if not np.all(np.isfinite(tau)):
            raise ValueError("tau_hat must be finite")
        if self.N < 2 or self.n < 2:
            raise ValueError("N and n must both be at least 2")
        object.__setattr__(self, "q_values", q)
        object.__setattr__(self, "tau_hat", tau)
        object.__setattr__(self, "skipped_cells", skipped)


def default_q_grid(q_max: float = 8.0, num_q: int = 40) -> np.ndarray:
    """Equispaced moment orders on (0, q_max]."""
    if not q_max > 0 or num_q < 1:
        raise ValueError("q_max must be positive and num_q at least 1")
    return np.linspace(q_max / num_q, q_max, num_q)


def build_scaling_curve(
    x, q_values=None, N: int = 20, min_blocks: int = MIN_BLOCKS_DEFAULT
) -> ScalingCurve:
    """Partition grid plus per-q regression slopes, over the given q grid."""
    series = as_series(x)
    if q_values is None:
        q_values = default_q_grid()
    grid = build_partition_grid(series, q_values, N)
    tau_hat = np.empty(grid.q_values.size)
    skipped = np.zeros(grid.q_values.size, dtype=np.int64)
    for i in range(grid.q_values.size):
        skipped[i] = int((~grid.valid[i]).sum())
        tau_hat[i] = empirical_scaling_function(grid, i, min_blocks=min_blocks)
    if skipped.sum() > 0:
        warnings.warn(
            f"{int(skipped.sum())} grid cells with zero partition function were "
            "skipped in the scaling regression",
            RuntimeWarning,
            stacklevel=2,
        )
    return ScalingCurve(
        q_values=grid.q_values, tau_hat=tau_hat, N=N, n=series.n, skipped_cells=skipped
    )
