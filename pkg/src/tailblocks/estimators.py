"""Tail-index estimators.

The primary estimator fits the empirical scaling function to its asymptotic
form by least squares over a grid of moment orders, split into two model
branches (infinite-variance alpha <= 2 and finite-variance alpha > 2).
Hill, moment and QQ tools based on upper order statistics are provided for
comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import EstimationError
from .scaling import ScalingCurve
from .series import as_series

LE2_INTERVAL = (0.05, 2.0)
GT2_INTERVAL = (2.0, 50.0)
GRID_STEP = 0.01
REFINE_TOL = 1e-6

# Two branch SSEs within this relative margin of each other make the
# branch choice inconclusive.
INCONCLUSIVE_REL = 0.01

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def model_le2(alpha: float, q: np.ndarray) -> np.ndarray:
    """Asymptotic scaling function restricted to the alpha <= 2 branch."""
    q = np.asarray(q, dtype=np.float64)
    return np.where(q <= alpha, q / alpha, 1.0)


def model_gt2(alpha: float, q: np.ndarray) -> np.ndarray:
    """Asymptotic scaling function restricted to the alpha > 2 branch."""
    q = np.asarray(q, dtype=np.float64)
    out = q / 2.0
    beyond = q > alpha
    if np.any(beyond):
        qb = q[beyond]
        diff = alpha - qb
        out = out.copy()
        out[beyond] += (
            2.0 * diff * diff * (2.0 * alpha + 4.0 * qb - 3.0 * alpha * qb)
            / (alpha ** 3 * (2.0 - qb) ** 2)
        )
    return out


@dataclass(frozen=True, eq=False)
class TailEstimate:
    """Result of the scaling-function least-squares fit."""

    alpha_hat: float
    branch: str
    sse: float
    q_values: np.ndarray
    branch_sse_other: float | None = None
    boundary_warning: bool = False
    inconclusive: bool = False

    def __post_init__(self):
        if self.branch not in ("le2", "gt2"):
            raise ValueError(f"unknown branch {self.branch!r}")
        if self.sse < 0:
            raise ValueError("sse must be nonnegative")
        if self.branch == "le2" and not self.alpha_hat <= 2.0:
            raise ValueError("le2 branch requires alpha_hat <= 2")
        if self.branch == "gt2" and not self.alpha_hat > 2.0:
            raise ValueError("gt2 branch requires alpha_hat > 2")


def _golden_section(f: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Minimize a unimodal function on [lo, hi] to bracket width tol."""
    h = hi - lo
    if h <= tol:
        return 0.5 * (lo + hi)
    c = hi - _INV_PHI * h
    d = lo + _INV_PHI * h
    fc, fd = f(c), f(d)
    while h > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            h = hi - lo
            c = hi - _INV_PHI * h
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            h = hi - lo
            d = lo + _INV_PHI * h
            fd = f(d)
    return 0.5 * (lo + hi)


# Model values over (alpha grid x q grid) are reused across fits that share
# a q grid, which is the common case in replicated experiments.
_MODEL_CACHE: dict[tuple, np.ndarray] = {}


def _alpha_grid(lo: float, hi: float, step: float) -> np.ndarray:
    count = int(round((hi - lo) / step))
    return np.linspace(lo, hi, count + 1)


def _model_matrix(branch: str, alphas: np.ndarray, q: np.ndarray) -> np.ndarray:
    key = (branch, alphas.size, float(alphas[0]), float(alphas[-1]), q.tobytes())
    cached = _MODEL_CACHE.get(key)
    if cached is not None:
        return cached
    model = model_le2 if branch == "le2" else model_gt2
    matrix = np.empty((alphas.size, q.size))
    for i, a in enumerate(alphas):
        matrix[i] = model(float(a), q)
    if len(_MODEL_CACHE) > 32:
        _MODEL_CACHE.clear()
    _MODEL_CACHE[key] = matrix
    return matrix


def _fit_branch(
    q: np.ndarray,
    tau_hat: np.ndarray,
    branch: str,
    interval: tuple[float, float],
    step: float,
    tol: float,
) -> tuple[float, float, bool]:
    """Dense grid scan followed by golden-section refinement in the best cell.

    Returns (alpha_hat, sse, boundary_hit). The objective is continuous but
    only piecewise smooth in alpha (the breakpoint q = alpha crosses grid
    points), hence the global scan before the local refinement.
    """
    model = model_le2 if branch == "le2" else model_gt2
    alphas = _alpha_grid(interval[0], interval[1], step)
    if branch == "gt2":
        # the gt2 interval is open at 2, where the model branch is undefined
        alphas = alphas[alphas > 2.0]
    matrix = _model_matrix(branch, alphas, q)
    sses = np.square(matrix - tau_hat).sum(axis=1)
    k = int(np.argmin(sses))

    def objective(a: float) -> float:
        return float(np.square(model(a, q) - tau_hat).sum())

    lo = float(alphas[max(k - 1, 0)])
    hi = float(alphas[min(k + 1, alphas.size - 1)])
    refined = _golden_section(objective, lo, hi, tol)
    best_alpha, best_sse = float(alphas[k]), float(sses[k])
    refined_sse = objective(refined)
    if refined_sse < best_sse:
        best_alpha, best_sse = refined, refined_sse
    boundary = k == 0 or k == alphas.size - 1
    return best_alpha, best_sse, boundary


def fit_tail_index(
    curve: ScalingCurve,
    branch: str = "auto",
    interval: tuple[float, float] | None = None,
    step: float = GRID_STEP,
    tol: float = REFINE_TOL,
) -> TailEstimate:
    """Least-squares fit of the empirical scaling function to its limit form.

    ``branch`` is one of "le2", "gt2" or "auto". Auto fits both branches and
    keeps the lower-SSE fit; when the two SSEs are within 1% of each other
    the le2 fit is reported with ``inconclusive`` set, since the fit quality
    does not separate the branches. ``interval`` restricts the search when a
    single branch is requested (must stay within (0, 2] resp. (2, 50]).
    """
    q = np.asarray(curve.q_values, dtype=np.float64)
    tau_hat = np.asarray(curve.tau_hat, dtype=np.float64)
    if q.size == 0:
        raise EstimationError("empty scaling curve")

    if branch == "auto":
        if interval is not None:
            raise ValueError("interval only applies to a single-branch fit")
        a_le2, sse_le2, b_le2 = _fit_branch(q, tau_hat, "le2", LE2_INTERVAL, step, tol)
        a_gt2, sse_gt2, b_gt2 = _fit_branch(q, tau_hat, "gt2", GT2_INTERVAL, step, tol)
        inconclusive = abs(sse_le2 - sse_gt2) <= INCONCLUSIVE_REL * max(sse_le2, sse_gt2)
        if inconclusive or sse_le2 <= sse_gt2:
            return TailEstimate(
                alpha_hat=a_le2, branch="le2", sse=sse_le2, q_values=q,
                branch_sse_other=sse_gt2, boundary_warning=b_le2,
                inconclusive=inconclusive,
            )
        return TailEstimate(
            alpha_hat=a_gt2, branch="gt2", sse=sse_gt2, q_values=q,
            branch_sse_other=sse_le2, boundary_warning=b_gt2,
        )

    if branch not in ("le2", "gt2"):
        raise ValueError(f"branch must be 'auto', 'le2' or 'gt2', got {branch!r}")
    default = LE2_INTERVAL if branch == "le2" else GT2_INTERVAL
    if interval is None:
        interval = default
    lo, hi = float(interval[0]), float(interval[1])
    if not (default[0] <= lo < hi <= default[1]):
        raise ValueError(f"search interval {interval} outside {default} for branch {branch}")
    alpha_hat, sse, boundary = _fit_branch(q, tau_hat, branch, (lo, hi), step, tol)
    return TailEstimate(
        alpha_hat=alpha_hat, branch=branch, sse=sse, q_values=q,
        boundary_warning=boundary,
    )


def _descending_order_stats(x, absolute: bool) -> np.ndarray:
    values = as_series(x).values
    if absolute:
        values = np.abs(values)
    return np.sort(values)[::-1]


def hill_estimate(x, k: int, absolute: bool = False) -> float:
    """Hill tail-index estimate from the k largest observations.

    Reciprocal of the mean log-ratio of the top k order statistics to the
    (k+1)-th. Requires the (k+1)-th largest value to be strictly positive.
    Set ``absolute`` to rank by magnitude instead of raw value.
    """
    stats = _descending_order_stats(x, absolute)
    n = stats.size
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must satisfy 1 <= k <= n-1, got k={k}, n={n}")
    pivot = stats[k]
    if pivot <= 0:
        raise ValueError("the (k+1)-th largest value must be strictly positive")
    mean_log = float(np.mean(np.log(stats[:k] / pivot)))
    if mean_log == 0.0:
        raise ValueError("top k+1 values are all equal; estimate is infinite")
    return 1.0 / mean_log


class MomentEstimate(NamedTuple):
    """Extreme value index gamma and, when positive, the implied tail index."""

    gamma: float
    alpha_hat: float | None


def moment_estimate(
    x, k: int, absolute: bool = False, formula: str = "standard"
) -> MomentEstimate:
    """Moment (extreme-value-index) estimate from the k largest observations.

    Combines the first and second empirical log-moments H1, H2 of the top
    order statistics as gamma = 1 + H1 - (1/2) / (1 - H1^2 / H2). A negative
    gamma indicates a light tail; alpha_hat = 1/gamma is exposed when gamma
    is positive.

    ``formula="as-printed"`` uses 1 + H1 + (1/2) / (H2^2/H1 - 1) instead, a
    variant that circulates with the squared second moment in the correction
    term; it fails the Pareto sanity check and exists for comparison only.
    """
    stats = _descending_order_stats(x, absolute)
    n = stats.size
    if not 2 <= k <= n - 1:
        raise ValueError(f"k must satisfy 2 <= k <= n-1, got k={k}, n={n}")
    pivot = stats[k]
    if pivot <= 0:
        raise ValueError("the (k+1)-th largest value must be strictly positive")
    logs = np.log(stats[:k] / pivot)
    h1 = float(np.mean(logs))
    h2 = float(np.mean(logs ** 2))
    if h2 == 0.0:
        raise ValueError("second log-moment is zero; top k+1 values are all equal")
    if formula == "standard":
        denom = 1.0 - h1 * h1 / h2
        if denom == 0.0:
            raise ValueError("degenerate log-moments: H1^2 equals H2")
        gamma = 1.0 + h1 - 0.5 / denom
    elif formula == "as-printed":
        denom = h2 * h2 / h1 - 1.0
        if denom == 0.0:
            raise ValueError("degenerate log-moments: H2^2 equals H1")
        gamma = 1.0 + h1 + 0.5 / denom
    else:
        raise ValueError(f"formula must be 'standard' or 'as-printed', got {formula!r}")
    return MomentEstimate(gamma=gamma, alpha_hat=1.0 / gamma if gamma > 0 else None)


def qq_points(x, k: int, absolute: bool = False) -> np.ndarray:
    """Exponential-quantile QQ points of the log-transformed top k values.

    Returns the k points (-ln(i/(k+1)), ln X_(i)) for i = 1..k, with X_(i)
    the i-th largest observation; k = n gives the full Zipf plot. A roughly
    linear plot of slope 1/alpha indicates a Pareto-type tail.
    """
    stats = _descending_order_stats(x, absolute)
    n = stats.size
    if not 1 <= k <= n:
        raise ValueError(f"k must satisfy 1 <= k <= n, got k={k}, n={n}")
    top = stats[:k]
    if top[-1] <= 0:
        raise ValueError("top k values must be strictly positive")
    ranks = np.arange(1, k + 1)
    return np.column_stack((-np.log(ranks / (k + 1)), np.log(top)))


@dataclass(frozen=True, eq=False)
class EstimatorTrace:
    """Per-k estimates for stability plots.

    ``mode`` records what ``estimates`` holds: "alpha" for Hill tail-index
    values, "evi" for moment extreme-value-index values. ``skipped`` counts
    k values where the estimator raised a domain error.
    """

    ks: np.ndarray
    estimates: np.ndarray
    mode: str
    skipped: int = 0

    def __post_init__(self):
        ks = np.asarray(self.ks, dtype=np.int64)
        est = np.asarray(self.estimates, dtype=np.float64)
        if ks.shape != est.shape:
            raise ValueError("ks and estimates must have equal length")
        if ks.size and not np.all(np.diff(ks) > 0):
            raise ValueError("ks must be strictly increasing")
        if self.mode not in ("alpha", "evi"):
            raise ValueError(f"unknown trace mode {self.mode!r}")
        object.__setattr__(self, "ks", ks)
        object.__setattr__(self, "estimates", est)


def estimator_trace(
    x,
    estimator: str,
    k_min: int,
    k_max: int,
    stride: int = 1,
    absolute: bool = False,
    formula: str = "standard",
) -> EstimatorTrace:
    """Estimates over a range of k for Hill or moment stability plots.

    k values where the estimator raises a domain error (for example
    nonpositive order statistics) are omitted and counted in ``skipped``.
    """
    series = as_series(x)
    n = series.n
    if estimator not in ("hill", "moment"):
        raise ValueError(f"estimator must be 'hill' or 'moment', got {estimator!r}")
    if not 1 <= k_min < k_max <= n - 1:
        raise ValueError(
            f"need 1 <= k_min < k_max <= n-1, got k_min={k_min}, k_max={k_max}, n={n}"
        )
    if stride < 1:
        raise ValueError(f"stride must be at least 1, got {stride}")
    ks: list[int] = []
    estimates: list[float] = []
    skipped = 0
    for k in range(k_min, k_max + 1, stride):
        try:
            if estimator == "hill":
                value = hill_estimate(series, k, absolute=absolute)
            else:
                value = moment_estimate(series, k, absolute=absolute, formula=formula).gamma
        except ValueError:
            skipped += 1
            continue
        ks.append(k)
        estimates.append(value)
    if not ks:
        raise EstimationError("no k in the requested range produced an estimate")
    mode = "alpha" if estimator == "hill" else "evi"
    return EstimatorTrace(
        ks=np.array(ks), estimates=np.array(estimates), mode=mode, skipped=skipped
    )
