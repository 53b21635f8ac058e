"""Seeded generators for every data-generating process used in the experiments.

All draws come from a named, platform-independent generator (PCG64 behind
numpy's Generator); a (seed, stream_id) pair is hashed into the seed
sequence, so replicates on distinct streams are independent and every
output is reproducible byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .series import TimeSeries

_UINT64_MAX = 2 ** 64 - 1

# Steps per chunk when long SDE paths are generated; bounds peak memory
# without changing the draw sequence.
_CHUNK_STEPS = 1_000_000

PROCESS_NAMES = (
    "iid_stable",
    "iid_student",
    "iid_normal",
    "pareto_f1",
    "f2",
    "ou_stable",
    "student_diffusion",
)


@dataclass(frozen=True)
class RngStream:
    """A (seed, stream_id) pair naming one reproducible random stream."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name, value in (("seed", self.seed), ("stream_id", self.stream_id)):
            if not 0 <= value <= _UINT64_MAX:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value}")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence([self.seed, self.stream_id])))


def make_rng(seed: int, stream_id: int = 0) -> np.random.Generator:
    """PCG64 generator for the given (seed, stream_id) pair."""
    return RngStream(seed=seed, stream_id=stream_id).generator()


def _stable_standard(rng: np.random.Generator, alpha: float, beta: float, size: int) -> np.ndarray:
    """Standard stable draws via the Chambers-Mallows-Stuck transform."""
    u = np.pi * (rng.random(size) - 0.5)
    w = rng.standard_exponential(size)
    half_pi = 0.5 * np.pi
    if alpha == 1.0:
        shifted = half_pi + beta * u
        with np.errstate(divide="ignore"):
            x = (shifted * np.tan(u) - beta * np.log(half_pi * w * np.cos(u) / shifted)) / half_pi
        return x
    tan_half = math.tan(half_pi * alpha)
    b = math.atan(beta * tan_half) / alpha
    scale_factor = (1.0 + (beta * tan_half) ** 2) ** (1.0 / (2.0 * alpha))
    with np.errstate(divide="ignore"):
        x = (
            scale_factor
            * np.sin(alpha * (u + b))
            / np.cos(u) ** (1.0 / alpha)
            * (np.cos(u - alpha * (u + b)) / w) ** ((1.0 - alpha) / alpha)
        )
    return x


def sample_stable(rng, alpha: float, beta: float = 0.0, scale: float = 1.0,
                  location: float = 0.0, size: int | None = None):
    """Stable-law draws with index alpha, skewness beta, the usual scale/location.

    At alpha = 2 the law is normal with variance 2*scale**2. The alpha = 1
    case uses its dedicated transform branch (with the log-scale shift that
    keeps the scale family consistent there).
    """
    if not 0 < alpha <= 2:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    if not -1 <= beta <= 1:
        raise ValueError(f"beta must lie in [-1, 1], got {beta}")
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    n = 1 if size is None else int(size)
    if n < 1:
        raise ValueError(f"size must be positive, got {size}")
    x = _stable_standard(rng, alpha, beta, n)
    if alpha == 1.0:
        out = scale * x + location + beta * (2.0 / np.pi) * scale * math.log(scale)
    else:
        out = scale * x + location
    return float(out[0]) if size is None else out


def sample_student(rng, nu: float, delta: float = 1.0, mu: float = 0.0,
                   size: int | None = None):
    """Draws from the scaled Student law with tail parameter nu.

    The density is proportional to (1 + ((x - mu)/delta)^2)^(-(nu+1)/2), so
    the tail index equals nu and the variance is delta^2/(nu - 2) for
    nu > 2. Sampled exactly as mu + delta * Z / sqrt(chi2_nu), no rejection.
    """
    if not nu > 1:
        raise ValueError(f"nu must exceed 1, got {nu}")
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    n = 1 if size is None else int(size)
    if n < 1:
        raise ValueError(f"size must be positive, got {size}")
    z = rng.standard_normal(n)
    chi2 = rng.chisquare(nu, n)
    out = mu + delta * z / np.sqrt(chi2)
    return float(out[0]) if size is None else out


def f1_survival(x):
    """Survival function 1/sqrt(x) on [1, inf)."""
    return np.asarray(x, dtype=np.float64) ** -0.5


def f1_inverse_survival(u):
    """Exact inverse of the f1 survival function: u -> u**-2."""
    return np.asarray(u, dtype=np.float64) ** -2.0


def f2_survival(x):
    """Survival function sqrt(e) / (sqrt(x) * ln x) on [e, inf)."""
    x = np.asarray(x, dtype=np.float64)
    return math.exp(0.5) / (np.sqrt(x) * np.log(x))


def f2_inverse_survival(u: float, rel_tol: float = 1e-10) -> float:
    """Solve the f2 survival equation for x >= e by bracketing bisection.

    The upper bracket is doubled until the survival falls below u; bisection
    then runs to the requested relative tolerance.
    """
    if not 0 < u <= 1:
        raise ValueError(f"survival level must lie in (0, 1], got {u}")
    if u == 1.0:
        return math.e
    lo = math.e
    hi = 2.0 * math.e
    while float(f2_survival(hi)) >= u:
        hi *= 2.0
    while (hi - lo) > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if float(f2_survival(mid)) >= u:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _open_uniform(rng, n: int) -> np.ndarray:
    # (0, 1]: survival-level draws must exclude 0.
    return 1.0 - rng.random(n)


def sample_f1(rng, size: int | None = None):
    """Pareto-type draws with tail index 1/2 via exact survival inversion."""
    n = 1 if size is None else int(size)
    if n < 1:
        raise ValueError(f"size must be positive, got {size}")
    out = f1_inverse_survival(_open_uniform(rng, n))
    return float(out[0]) if size is None else out


def sample_f2(rng, size: int | None = None):
    """Tail-index-1/2 draws with a logarithmic slowly varying factor.

    The survival function has no closed-form inverse; each draw solves it by
    bisection.
    """
    n = 1 if size is None else int(size)
    if n < 1:
        raise ValueError(f"size must be positive, got {size}")
    out = np.array([f2_inverse_survival(u) for u in _open_uniform(rng, n)])
    return float(out[0]) if size is None else out


def _retained_per_unit(chunk: np.ndarray, substeps: int) -> np.ndarray:
    return chunk[substeps - 1::substeps]


def _ar1_path(x0: float, phi: float, noise: np.ndarray) -> np.ndarray:
    """x[k] = phi * x[k-1] + noise[k] with x[-1] = x0; one value per noise term."""
    path, _ = lfilter([1.0], [1.0, -phi], noise, zi=np.array([phi * x0]))
    return path


def simulate_ou_stable(rng, alpha: float, lam: float, n: int, substeps: int = 100,
                       burn_in: int | None = None) -> TimeSeries:
    """Euler path of the stable-driven mean-reverting (OU type) process.

    One observation is retained per unit time; each unit is split into
    ``substeps`` Euler steps whose noise increments are symmetric stable
    draws with scale (lam * dt)**(1/alpha). The start value is a single
    stable draw and the first ``burn_in`` retained observations (default
    10 * ceil(1/lam)) are discarded to wash it out.
    """
    if not 0 < alpha <= 2:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    if not lam > 0:
        raise ValueError(f"lam must be positive, got {lam}")
    if n < 1 or substeps < 1:
        raise ValueError("n and substeps must be at least 1")
    dt = 1.0 / substeps
    if lam * dt >= 1.0:
        raise ValueError(
            f"unstable Euler step: lam/substeps = {lam * dt:g} must stay below 1"
        )
    if burn_in is None:
        burn_in = 10 * math.ceil(1.0 / lam)
    if burn_in < 0:
        raise ValueError(f"burn_in must be nonnegative, got {burn_in}")

    phi = 1.0 - lam * dt
    noise_scale = (lam * dt) ** (1.0 / alpha)
    total_units = n + burn_in
    total_steps = total_units * substeps
    chunk_steps = substeps * max(1, _CHUNK_STEPS // substeps)

    x = sample_stable(rng, alpha)
    retained = np.empty(total_units)
    done = 0
    while done < total_steps:
        m = min(chunk_steps, total_steps - done)
        noise = noise_scale * _stable_standard(rng, alpha, 0.0, m)
        path = _ar1_path(x, phi, noise)
        x = float(path[-1])
        picked = _retained_per_unit(path, substeps)
        start = done // substeps
        retained[start:start + picked.size] = picked
        done += m
    return TimeSeries(values=retained[burn_in:], source=f"ou_stable(alpha={alpha:g}, lam={lam:g})")


def _student_diffusion_steps(x0: float, z, dt: float, theta: float, mu: float,
                             delta: float, nu: float, milstein: bool = True) -> np.ndarray:
    """Advance the Student diffusion through one step per noise value.

    The squared diffusion coefficient is c * (delta^2 + (x - mu)^2) with
    c = 2*theta/(nu - 1); its Milstein correction term is (c/2) * (x - mu)
    * dt * (z^2 - 1), which vanishes at x = mu.
    """
    c = 2.0 * theta / (nu - 1.0)
    sqrt_dt = math.sqrt(dt)
    half_c_dt = 0.5 * c * dt
    delta_sq = delta * delta
    out = np.empty(len(z))
    x = float(x0)
    for i, zk in enumerate(z):
        d = x - mu
        move = -theta * d * dt + math.sqrt(c * (delta_sq + d * d)) * sqrt_dt * zk
        if milstein:
            move += half_c_dt * d * (zk * zk - 1.0)
        x += move
        out[i] = x
    return out


def simulate_student_diffusion(rng, nu: float, delta: float, mu: float, theta: float,
                               n: int, substeps: int = 100,
                               burn_in: int | None = None) -> TimeSeries:
    """Milstein path of the ergodic diffusion with scaled-Student marginal.

    Drift -theta*(x - mu), squared diffusion coefficient
    2*theta*delta^2/(nu-1) * (1 + ((x-mu)/delta)^2). The start value is
    drawn from the stationary Student law; one observation is retained per
    unit time and the first ``burn_in`` (default 10 * ceil(1/theta)) are
    discarded.
    """
    if not nu > 1:
        raise ValueError(f"nu must exceed 1, got {nu}")
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    if n < 1 or substeps < 1:
        raise ValueError("n and substeps must be at least 1")
    dt = 1.0 / substeps
    if theta * dt >= 1.0:
        raise ValueError(
            f"unstable step: theta/substeps = {theta * dt:g} must stay below 1"
        )
    if burn_in is None:
        burn_in = 10 * math.ceil(1.0 / theta)
    if burn_in < 0:
        raise ValueError(f"burn_in must be nonnegative, got {burn_in}")

    total_units = n + burn_in
    total_steps = total_units * substeps
    chunk_steps = substeps * max(1, _CHUNK_STEPS // substeps)

    x = sample_student(rng, nu, delta, mu)
    retained = np.empty(total_units)
    done = 0
    while done < total_steps:
        m = min(chunk_steps, total_steps - done)
        z = rng.standard_normal(m).tolist()
        path = _student_diffusion_steps(x, z, dt, theta, mu, delta, nu)
        x = float(path[-1])
        picked = _retained_per_unit(path, substeps)
        start = done // substeps
        retained[start:start + picked.size] = picked
        done += m
    return TimeSeries(
        values=retained[burn_in:],
        source=f"student_diffusion(nu={nu:g}, delta={delta:g}, mu={mu:g}, theta={theta:g})",
    )


_IID_LAWS = ("stable", "student", "normal", "f1", "f2")


def simulate_iid(rng, law: str, n: int, **params) -> TimeSeries:
    """n independent draws from one of the base laws.

    law is one of "stable" (alpha, beta, scale, location), "student"
    (nu, delta, mu), "normal" (location, scale), "f1" or "f2" (no
    parameters).
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if law == "stable":
        values = sample_stable(rng, size=n, **params)
    elif law == "student":
        values = sample_student(rng, size=n, **params)
    elif law == "normal":
        location = params.pop("location", 0.0)
        scale = params.pop("scale", 1.0)
        if params:
            raise ValueError(f"unknown normal parameters: {sorted(params)}")
        if not scale > 0:
            raise ValueError(f"scale must be positive, got {scale}")
        values = location + scale * rng.standard_normal(n)
    elif law == "f1":
        if params:
            raise ValueError(f"f1 takes no parameters, got {sorted(params)}")
        values = sample_f1(rng, size=n)
    elif law == "f2":
        if params:
            raise ValueError(f"f2 takes no parameters, got {sorted(params)}")
        values = sample_f2(rng, size=n)
    else:
        raise ValueError(f"law must be one of {_IID_LAWS}, got {law!r}")
    return TimeSeries(values=values, source=f"iid_{law}")


@dataclass(frozen=True)
class SimulationSpec:
    """A fully specified simulation: process name, parameters, length, SDE controls."""

    process: str
    n: int
    params: dict = field(default_factory=dict)
    substeps: int = 100
    burn_in: int | None = None

    def __post_init__(self):
        if self.process not in PROCESS_NAMES:
            raise ValueError(f"process must be one of {PROCESS_NAMES}, got {self.process!r}")
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")
        if self.substeps < 1:
            raise ValueError(f"substeps must be at least 1, got {self.substeps}")
        if self.burn_in is not None and self.burn_in < 0:
            raise ValueError(f"burn_in must be nonnegative, got {self.burn_in}")


def run_simulation(spec: SimulationSpec, seed: int, stream_id: int = 0) -> TimeSeries:
    """Simulate per spec on the (seed, stream_id) stream."""
    rng = make_rng(seed, stream_id)
    p = dict(spec.params)
    if spec.process == "iid_stable":
        return simulate_iid(rng, "stable", spec.n, **p)
    if spec.process == "iid_student":
        return simulate_iid(rng, "student", spec.n, **p)
    if spec.process == "iid_normal":
        return simulate_iid(rng, "normal", spec.n, **p)
    if spec.process == "pareto_f1":
        return simulate_iid(rng, "f1", spec.n, **p)
    if spec.process == "f2":
        return simulate_iid(rng, "f2", spec.n, **p)
    if spec.process == "ou_stable":
        return simulate_ou_stable(
            rng, alpha=p.pop("alpha"), lam=p.pop("lam"), n=spec.n,
            substeps=spec.substeps, burn_in=spec.burn_in, **p
        )
    return simulate_student_diffusion(
        rng, nu=p.pop("nu"), delta=p.pop("delta", 1.0), mu=p.pop("mu", 0.0),
        theta=p.pop("theta"), n=spec.n, substeps=spec.substeps,
        burn_in=spec.burn_in, **p
    )
