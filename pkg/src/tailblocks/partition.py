"""Block partition function and the (q, s) grid of its log-growth ratios.

The partition function splits the sample into consecutive blocks, sums each
block, and averages the q-th absolute powers of the block sums. Its growth
rate in the block exponent s (block length ~ n^s) carries the tail index of
the marginal distribution, which is what the scaling and estimator modules
exploit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .series import as_series


def _block_sums(values: np.ndarray, m: int) -> np.ndarray:
    """Sums of consecutive length-m blocks; the trailing remainder is dropped.

    Uses exact summation (math.fsum): q-th powers downstream amplify any
    cancellation error, which matters for heavy-tailed data.
    """
    nb = values.size // m
    if m == 1:
        return values[:nb].astype(np.float64, copy=True)
    out = np.empty(nb)
    for i in range(nb):
        out[i] = math.fsum(values[i * m:(i + 1) * m])
    return out


def partition_function(x, q: float, t: float) -> float:
    """Average q-th absolute power of consecutive block sums.

    The sample is split into ``floor(n / floor(t))`` blocks of length
    ``floor(t)``; trailing observations beyond the last complete block are
    discarded. ``t = 1`` gives the empirical q-th absolute moment.

    Raises ValueError unless q > 0 and 1 <= t <= n.
    """
    series = as_series(x)
    n = series.n
    if not q > 0:
        raise ValueError(f"moment order q must be positive, got {q}")
    if not (1 <= t <= n):
        raise ValueError(f"block scale t must satisfy 1 <= t <= n, got t={t}, n={n}")
    m = max(1, math.floor(t))
    block_sums = _block_sums(series.values, m)
    return math.fsum(np.abs(block_sums) ** q) / block_sums.size


def block_length(n: int, s: float) -> int:
    """Block length floor(n**s), clamped to at least 1."""
    return max(1, math.floor(n ** s))


@dataclass(frozen=True, eq=False)
class PartitionGrid:
    """Matrix of ln S_q(n, n^s) / ln n over a (q, s) lattice.

    ``cells[i, j]`` corresponds to ``q_values[i]`` and ``s_values[j]``.
    Cells where the partition function is zero (or overflows) are flagged
    invalid in ``valid`` rather than stored as -inf; such cells hold NaN.
    """

    q_values: np.ndarray
    s_values: np.ndarray
    n: int
    cells: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q_values, dtype=np.float64)
        s = np.asarray(self.s_values, dtype=np.float64)
        cells = np.asarray(self.cells, dtype=np.float64)
        valid = np.asarray(self.valid, dtype=bool)
        if q.ndim != 1 or s.ndim != 1:
            raise ValueError("q_values and s_values must be one-dimensional")
        if not (np.all(q > 0) and np.all(np.diff(q) > 0)):
            raise ValueError("q_values must be strictly increasing and positive")
        if not (np.all(s > 0) and np.all(s < 1) and np.all(np.diff(s) > 0)):
            raise ValueError("s_values must be strictly increasing within (0, 1)")
        if cells.shape != (q.size, s.size) or valid.shape != cells.shape:
            raise ValueError("cells/valid shape must be (len(q_values), len(s_values))")
        if not np.all(np.isfinite(cells[valid])):
            raise ValueError("valid cells must be finite")
        for name, arr in (("q_values", q), ("s_values", s), ("cells", cells), ("valid", valid)):
            object.__setattr__(self, name, arr)


def build_partition_grid(x, q_values, N: int) -> PartitionGrid:
    """Evaluate ln S_q(n, n^{j/N}) / ln n for j = 1..N-1 over a q grid.

    Block sums are shared across q for each exponent, so the grid costs one
    pass over the data per distinct block length. Requires n >= 2 (ln n is
    zero at n = 1) and N >= 2.
    """
    series = as_series(x)
    values = series.values
    n = series.n
    if n < 2:
        raise ValueError("need at least 2 observations to normalize by ln n")
    if N < 2:
        raise ValueError(f"N must be at least 2, got {N}")
    q = np.asarray(q_values, dtype=np.float64)
    if q.ndim != 1 or q.size == 0 or not (np.all(q > 0) and np.all(np.diff(q) > 0)):
        raise ValueError("q_values must be strictly increasing and positive")

    s_values = np.arange(1, N) / N
    log_n = math.log(n)
    cells = np.full((q.size, s_values.size), np.nan)
    valid = np.zeros_like(cells, dtype=bool)

    sums_by_length: dict[int, np.ndarray] = {}
    for j, s in enumerate(s_values):
        m = block_length(n, s)
        block_sums = sums_by_length.get(m)
        if block_sums is None:
            block_sums = _block_sums(values, m)
            sums_by_length[m] = block_sums
        abs_sums = np.abs(block_sums)
        nb = abs_sums.size
        for i, qi in enumerate(q):
            with np.errstate(over="ignore"):
                value = math.fsum(abs_sums ** qi) / nb
            if value > 0 and math.isfinite(value):
                cells[i, j] = math.log(value) / log_n
                valid[i, j] = True
    return PartitionGrid(q_values=q, s_values=s_values, n=n, cells=cells, valid=valid)


def blocks_used(n: int, t: float) -> tuple[int, int]:
    """(number of blocks, observations touched) for a sample of size n at scale t."""
    m = max(1, math.floor(t))
    nb = n // m
    return nb, nb * m
