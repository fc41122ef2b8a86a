"""Poisson INAR(1) process: thinning, transition law, simulation, contamination.

The process is X_t = thin(X_{t-1}, alpha) + e_t with e_t ~ Poisson(lam), where
``thin`` keeps each of the X_{t-1} units independently with probability alpha.
An additive outlier of size w at time t turns the observation into Y_t = X_t + w
without touching the latent dynamics, so it perturbs the likelihood only at
times t and t+1.

Time indices are 1-based in all public interfaces (t = 1..n, matching file row
numbers); arrays are 0-based internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import FeasibilityError, SeriesValidationError

NEG_INF = float("-inf")


@dataclass(frozen=True)
class CountSeries:
    """An ordered sequence of non-negative integer counts, length >= 2."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values)
        if arr.ndim != 1:
            raise SeriesValidationError(f"series must be 1-dimensional, got shape {arr.shape}")
        if arr.size < 2:
            raise SeriesValidationError(f"series needs at least 2 observations, got {arr.size}")
        if arr.dtype.kind == "f":
            if not np.all(np.isfinite(arr)) or np.any(arr != np.floor(arr)):
                raise SeriesValidationError("series contains non-integer values")
            arr = arr.astype(np.int64)
        elif arr.dtype.kind == "b":
            arr = arr.astype(np.int64)
        elif arr.dtype.kind not in "iu":
            raise SeriesValidationError(f"series has non-numeric dtype {arr.dtype}")
        else:
            arr = arr.astype(np.int64)
        if np.any(arr < 0):
            idx = int(np.argmax(arr < 0))
            raise SeriesValidationError(f"negative count {arr[idx]} at t={idx + 1}")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class InarParams:
    """Thinning probability and Poisson innovation mean of an INAR(1) model."""

    alpha: float
    lam: float

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise ValueError(f"lam must be positive and finite, got {self.lam}")

    @property
    def stationary_mean(self) -> float:
        if self.alpha >= 1.0:
            raise ValueError("no stationary distribution for alpha = 1")
        return self.lam / (1.0 - self.alpha)


@dataclass(frozen=True)
class Contamination:
    """Additive outliers: strictly increasing times (>= 2) with positive sizes."""

    times: tuple[int, ...]
    sizes: tuple[int, ...]

    def __post_init__(self):
        times = tuple(int(t) for t in self.times)
        sizes = tuple(int(s) for s in self.sizes)
        if len(times) != len(sizes):
            raise ValueError(f"{len(times)} times but {len(sizes)} sizes")
        if any(t < 2 for t in times):
            raise ValueError("outliers at t=1 are not allowed (first observation is clean)")
        if any(times[i] >= times[i + 1] for i in range(len(times) - 1)):
            raise ValueError("outlier times must be strictly increasing")
        if any(s < 1 for s in sizes):
            raise ValueError("outlier sizes must be >= 1")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "sizes", sizes)

    def __len__(self) -> int:
        return len(self.times)


def binomial_thin(x: int, alpha: float, rng: np.random.Generator) -> int:
    """Thin a count: sum of ``x`` independent Bernoulli(alpha) survivals."""
    if x < 0:
        raise ValueError(f"count must be non-negative, got {x}")
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return int(rng.binomial(x, alpha))


def _trans_logpmf(x_prev: int, x_curr: int, alpha: float, lam: float) -> float:
    """Log P(X_t = x_curr | X_{t-1} = x_prev) for the Poisson INAR(1) transition.

    The transition is the convolution of Binomial(x_prev, alpha) survivors with
    a Poisson(lam) innovation, summed in log space.  Hot path: pure ``math``
    calls, no numpy.
    """
    if alpha <= 0.0:
        return x_curr * math.log(lam) - lam - math.lgamma(x_curr + 1)
    if alpha >= 1.0:
        k = x_curr - x_prev
        if k < 0:
            return NEG_INF
        return k * math.log(lam) - lam - math.lgamma(k + 1)
    m = x_prev if x_prev < x_curr else x_curr
    log_a = math.log(alpha)
    log_1ma = math.log1p(-alpha)
    log_lam = math.log(lam)
    lg_prev = math.lgamma(x_prev + 1)
    terms = []
    best = NEG_INF
    for i in range(m + 1):
        t = (
            lg_prev
            - math.lgamma(i + 1)
            - math.lgamma(x_prev - i + 1)
            + i * log_a
            + (x_prev - i) * log_1ma
            + (x_curr - i) * log_lam
            - math.lgamma(x_curr - i + 1)
        )
        terms.append(t)
        if t > best:
            best = t
    acc = 0.0
    for t in terms:
        acc += math.exp(t - best)
    return best + math.log(acc) - lam


def transition_log_pmf(x_prev: int, x_curr: int, params: InarParams) -> float:
    """Log transition probability of moving from ``x_prev`` to ``x_curr``."""
    if x_prev < 0 or x_curr < 0:
        raise ValueError("counts must be non-negative")
    return _trans_logpmf(int(x_prev), int(x_curr), params.alpha, params.lam)


def simulate(
    params: InarParams,
    n: int,
    rng: np.random.Generator,
    initial: int | None = None,
) -> CountSeries:
    """Simulate n steps of the process.

    X_1 is drawn from the stationary Poisson(lam / (1 - alpha)) marginal unless
    ``initial`` pins it to a fixed value.  alpha = 1 has no stationary law and
    requires ``initial``.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if initial is None:
        if params.alpha >= 1.0:
            raise ValueError("alpha = 1 has no stationary distribution; pass initial=")
        x0 = int(rng.poisson(params.stationary_mean))
    else:
        if initial < 0:
            raise ValueError(f"initial count must be non-negative, got {initial}")
        x0 = int(initial)
    x = np.empty(n, dtype=np.int64)
    x[0] = x0
    alpha, lam = params.alpha, params.lam
    for t in range(1, n):
        x[t] = rng.binomial(x[t - 1], alpha) + rng.poisson(lam)
    return CountSeries(x)


def contaminate(series: CountSeries, contamination: Contamination) -> CountSeries:
    """Add the outlier sizes at their times: Y_t = X_t + w at listed t."""
    n = len(series)
    if contamination.times and contamination.times[-1] > n:
        raise ValueError(
            f"outlier time {contamination.times[-1]} beyond series length {n}"
        )
    y = series.values.copy()
    for t, w in zip(contamination.times, contamination.sizes):
        y[t - 1] += w
    return CountSeries(y)


def decontaminate(
    series: CountSeries, delta: np.ndarray, eta: np.ndarray
) -> CountSeries:
    """Recover the latent series X_t = Y_t - eta_t * delta_t.

    ``delta`` and ``eta`` are full-length arrays (position 0 is time 1 and must
    be clean).  Raises FeasibilityError if any implied count is negative.
    """
    y = series.values
    n = len(series)
    delta = np.asarray(delta, dtype=np.int64)
    eta = np.asarray(eta, dtype=np.int64)
    if delta.shape != (n,) or eta.shape != (n,):
        raise ValueError(f"delta and eta must have shape ({n},)")
    if np.any((delta != 0) & (delta != 1)):
        raise ValueError("delta entries must be 0 or 1")
    if np.any(eta < 0):
        raise ValueError("eta entries must be non-negative")
    if delta[0] != 0:
        raise ValueError("no outlier is allowed at t=1")
    x = y - delta * eta
    if np.any(x < 0):
        idx = int(np.argmax(x < 0))
        raise FeasibilityError(
            f"implied latent count {x[idx]} at t={idx + 1} is negative"
        )
    return CountSeries(x)
