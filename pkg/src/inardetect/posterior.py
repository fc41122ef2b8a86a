"""Log-density kernels: conditional likelihood, joint prior, joint posterior.

Everything here is unnormalized (constants that cancel in ratios and finite
normalized sums are dropped) and everything is in log space.  Infeasible
configurations map to -inf rather than raising: the samplers rely on zero
probability, not exceptions.

Convention: the conditional likelihood given the first observation is the
product of the n-1 one-step transition probabilities, each carrying one
exp(-lam) factor, so the total exponential factor is exp(-(n-1)*lam).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .process import NEG_INF, CountSeries, InarParams, _trans_logpmf


@dataclass(frozen=True)
class Hyperparams:
    """Prior hyperparameters.

    a, b:  Beta shape pair for the thinning probability alpha.
    c, d:  Gamma shape/rate for the innovation mean lam.
    h, g:  Beta shape pair for the outlier occurrence probability epsilon.
    beta:  Poisson mean of the outlier-size prior.

    Defaults are the flat-ish working choices: a=b=c=d=0.001, h=5, g=95
    (prior outlier probability 0.05), beta=30 (vague size prior).
    """

    a: float = 0.001
    b: float = 0.001
    c: float = 0.001
    d: float = 0.001
    h: float = 5.0
    g: float = 95.0
    beta: float = 30.0

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "h", "g", "beta"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"hyperparameter {name} must be positive, got {value}")


@dataclass(frozen=True)
class LatentConfig:
    """One outlier configuration: indicators, sizes, occurrence probability.

    ``delta`` and ``eta`` are full-length arrays aligned with the series;
    position 0 (time 1) is fixed to zero because the first observation is
    assumed clean.  Feasibility against a particular series (Y_t - eta_t*delta_t
    >= 0) is *not* enforced here; the likelihood returns -inf for infeasible
    pairs instead.
    """

    delta: np.ndarray
    eta: np.ndarray
    epsilon: float

    def __post_init__(self):
        delta = np.asarray(self.delta, dtype=np.int64)
        eta = np.asarray(self.eta, dtype=np.int64)
        if delta.ndim != 1 or eta.shape != delta.shape:
            raise ValueError("delta and eta must be 1-d arrays of equal length")
        if np.any((delta != 0) & (delta != 1)):
            raise ValueError("delta entries must be 0 or 1")
        if np.any(eta < 0):
            raise ValueError("eta entries must be non-negative")
        if delta[0] != 0 or eta[0] != 0:
            raise ValueError("position 0 (time 1) must be clean: delta[0] = eta[0] = 0")
        if not (0.0 < self.epsilon < 1.0):
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        delta.flags.writeable = False
        eta.flags.writeable = False
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "eta", eta)


def conditional_log_likelihood(
    series_y: CountSeries, params: InarParams, config: LatentConfig
) -> float:
    """Log likelihood of the observations given the outlier configuration.

    Sums the transition log-pmf over t = 2..n with the latent series
    X_t = Y_t - eta_t*delta_t substituted in.  Returns -inf when any implied
    latent count is negative.
    """
    y = series_y.values
    if config.delta.shape != y.shape:
        raise ValueError("config length does not match series length")
    x = y - config.delta * config.eta
    if np.any(x < 0):
        return NEG_INF
    alpha, lam = params.alpha, params.lam
    total = 0.0
    xs = x.tolist()
    for t in range(1, len(xs)):
        total += _trans_logpmf(xs[t - 1], xs[t], alpha, lam)
        if total == NEG_INF:
            return NEG_INF
    return total


def log_prior(params: InarParams, config: LatentConfig, hyper: Hyperparams) -> float:
    """Unnormalized log prior of (alpha, lam, delta, eta, epsilon).

    Beta(a,b) kernel on alpha, Gamma(c,d) kernel on lam, Beta(h,g) kernel on
    epsilon, Bernoulli(epsilon) terms for each delta_t, and the full
    Poisson(beta) log-pmf for each eta_t, t = 2..n.
    """
    alpha, lam = params.alpha, params.lam
    eps = config.epsilon
    if not (0.0 < alpha < 1.0) or lam <= 0.0:
        return NEG_INF
    value = (hyper.a - 1.0) * math.log(alpha) + (hyper.b - 1.0) * math.log1p(-alpha)
    value += (hyper.c - 1.0) * math.log(lam) - hyper.d * lam
    value += (hyper.h - 1.0) * math.log(eps) + (hyper.g - 1.0) * math.log1p(-eps)
    log_eps = math.log(eps)
    log_1meps = math.log1p(-eps)
    log_beta = math.log(hyper.beta)
    for t in range(1, config.delta.size):
        value += log_eps if config.delta[t] else log_1meps
        e = int(config.eta[t])
        value += e * log_beta - hyper.beta - math.lgamma(e + 1)
    return value


def log_posterior(
    series_y: CountSeries,
    params: InarParams,
    config: LatentConfig,
    hyper: Hyperparams,
) -> float:
    """Unnormalized log posterior: log prior + conditional log likelihood."""
    prior = log_prior(params, config, hyper)
    if prior == NEG_INF:
        return NEG_INF
    return prior + conditional_log_likelihood(series_y, params, config)
