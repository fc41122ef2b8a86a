"""Full-conditional building blocks for the Gibbs sweep.

Five pieces: log-density kernels for alpha and lam (sampled via ARMS), the
exact Bernoulli probability for each outlier indicator delta_j, the exact
finite-support pmf for each outlier size eta_j, and the conjugate Beta update
for the occurrence probability epsilon.

The alpha and lam kernels share the same per-transition finite sums as the
likelihood; ``make_alpha_log_conditional`` / ``make_lambda_log_conditional``
flatten those sums once (the latent series is fixed while alpha or lam moves)
so that each kernel evaluation is a handful of vectorized passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import expit, gammaln

from .posterior import Hyperparams
from .process import NEG_INF, CountSeries, InarParams, _trans_logpmf


@dataclass(frozen=True)
class OutlierProbability:
    """Posterior probability that time t carries an additive outlier."""

    t: int
    p: float


@dataclass(frozen=True)
class FinitePmf:
    """A normalized pmf on a finite integer support."""

    support: np.ndarray
    probs: np.ndarray

    def mean(self) -> float:
        return float(np.dot(self.support, self.probs))

    def mode(self) -> int:
        return int(self.support[int(np.argmax(self.probs))])


def _flatten_terms(x: np.ndarray):
    """Flatten the (transition, survivor-count) term grid of the likelihood.

    For each transition t the inner sum runs over i = 0..min(X_{t-1}, X_t).
    Returns flat arrays indexed by (t, i) in row-major order plus reduceat
    segment starts, so per-transition log-sum-exp is two reduceat passes.
    """
    xp = x[:-1]
    xc = x[1:]
    m = np.minimum(xp, xc)
    seg_len = m + 1
    width = int(m.max()) + 1
    grid = np.broadcast_to(np.arange(width), (xp.size, width))
    mask = grid <= m[:, None]
    i_flat = grid[mask].astype(np.float64)
    xp_flat = np.repeat(xp, seg_len).astype(np.float64)
    xc_flat = np.repeat(xc, seg_len).astype(np.float64)
    seg_start = np.concatenate(([0], np.cumsum(seg_len)[:-1]))
    log_binom = (
        gammaln(xp_flat + 1.0) - gammaln(i_flat + 1.0) - gammaln(xp_flat - i_flat + 1.0)
    )
    return i_flat, xp_flat, xc_flat, seg_start, seg_len, log_binom


def _segment_logsumexp(terms: np.ndarray, seg_start: np.ndarray, seg_len: np.ndarray) -> float:
    peaks = np.maximum.reduceat(terms, seg_start)
    sums = np.add.reduceat(np.exp(terms - np.repeat(peaks, seg_len)), seg_start)
    return float(np.sum(peaks + np.log(sums)))


def make_alpha_log_conditional(
    x: np.ndarray, lam: float, hyper: Hyperparams
) -> Callable[[float], float]:
    """Build the log conditional kernel of alpha given the latent series and lam.

    Kernel: Beta(a,b) prior kernel times, per transition, the finite sum over
    survivor counts i of C(X_{t-1}, i) alpha^i (1-alpha)^{X_{t-1}-i}
    lam^{X_t-i} / (X_t-i)!.  Constant-in-alpha factors are dropped.
    """
    x = np.asarray(x, dtype=np.int64)
    i_flat, xp_flat, xc_flat, seg_start, seg_len, log_binom = _flatten_terms(x)
    log_t = log_binom + (xc_flat - i_flat) * math.log(lam) - gammaln(xc_flat - i_flat + 1.0)
    a, b = hyper.a, hyper.b
    surv = xp_flat - i_flat

    def kernel(alpha: float) -> float:
        if not (0.0 < alpha < 1.0):
            return NEG_INF
        terms = log_t + i_flat * math.log(alpha) + surv * math.log1p(-alpha)
        value = _segment_logsumexp(terms, seg_start, seg_len)
        return value + (a - 1.0) * math.log(alpha) + (b - 1.0) * math.log1p(-alpha)

    return kernel


def make_lambda_log_conditional(
    x: np.ndarray, alpha: float, hyper: Hyperparams
) -> Callable[[float], float]:
    """Build the log conditional kernel of lam given the latent series and alpha.

    Kernel: Gamma(c, d) prior kernel, the exp(-(n-1)*lam) likelihood factor,
    and per transition the finite sum over i of
    C(X_{t-1}, i) alpha^i (1-alpha)^{X_{t-1}-i} lam^{X_t-i} / (X_t-i)!.
    """
    x = np.asarray(x, dtype=np.int64)
    n_trans = x.size - 1
    i_flat, xp_flat, xc_flat, seg_start, seg_len, log_binom = _flatten_terms(x)
    if alpha <= 0.0:
        keep = i_flat == 0
    elif alpha >= 1.0:
        # thinning keeps everything: only i = X_{t-1} contributes, and the
        # whole kernel is zero unless every transition is non-decreasing
        if np.any(x[1:] < x[:-1]):
            return lambda lam: NEG_INF
        keep = i_flat == xp_flat
    else:
        keep = None
    if keep is not None:
        i_flat, xp_flat, xc_flat, log_binom = (
            arr[keep] for arr in (i_flat, xp_flat, xc_flat, log_binom)
        )
        seg_len = np.ones(n_trans, dtype=np.int64)
        seg_start = np.arange(n_trans)
        log_u = log_binom - gammaln(xc_flat - i_flat + 1.0)
        if alpha >= 1.0:
            log_u = -gammaln(xc_flat - i_flat + 1.0)
    else:
        log_u = (
            log_binom
            + i_flat * math.log(alpha)
            + (xp_flat - i_flat) * math.log1p(-alpha)
            - gammaln(xc_flat - i_flat + 1.0)
        )
    pois_pow = xc_flat - i_flat
    c, d = hyper.c, hyper.d
    rate = d + n_trans

    def kernel(lam: float) -> float:
        if lam <= 0.0:
            return NEG_INF
        terms = log_u + pois_pow * math.log(lam)
        value = _segment_logsumexp(terms, seg_start, seg_len)
        return value + (c - 1.0) * math.log(lam) - rate * lam

    return kernel


def alpha_log_conditional(
    alpha: float, x: np.ndarray, lam: float, hyper: Hyperparams
) -> float:
    """Evaluate the alpha conditional kernel at one point (see the builder)."""
    return make_alpha_log_conditional(x, lam, hyper)(alpha)


def lambda_log_conditional(
    lam: float, x: np.ndarray, alpha: float, hyper: Hyperparams
) -> float:
    """Evaluate the lam conditional kernel at one point (see the builder)."""
    return make_lambda_log_conditional(x, alpha, hyper)(lam)


def _delta_prob(
    jj: int,
    y: np.ndarray,
    x: np.ndarray,
    alpha: float,
    lam: float,
    eta_j: int,
    epsilon: float,
) -> float:
    """P(delta_j = 1 | everything else) at 0-based position jj.

    Both branches share all transitions except t = j and t = j+1 (the outlier
    touches the likelihood only there), so only those factors enter the odds.
    ``x`` holds the current latent values at the neighbors.
    """
    n = y.size
    x_prev = int(x[jj - 1])
    x1 = int(y[jj]) - eta_j
    if x1 < 0:
        return 0.0
    x0 = int(y[jj])
    ll1 = _trans_logpmf(x_prev, x1, alpha, lam)
    ll0 = _trans_logpmf(x_prev, x0, alpha, lam)
    if jj + 1 < n:
        x_next = int(x[jj + 1])
        ll1 += _trans_logpmf(x1, x_next, alpha, lam)
        ll0 += _trans_logpmf(x0, x_next, alpha, lam)
    if ll1 == NEG_INF:
        return 0.0
    if ll0 == NEG_INF:
        return 1.0
    logit = math.log(epsilon) - math.log1p(-epsilon) + ll1 - ll0
    return float(expit(logit))


def delta_probability(
    j: int,
    series: CountSeries,
    params: InarParams,
    delta: np.ndarray,
    eta: np.ndarray,
    epsilon: float,
) -> OutlierProbability:
    """Exact conditional outlier probability at 1-based time j in {2..n}.

    Conditions on the current indicators and sizes everywhere else (through
    the latent values at j-1 and j+1) and on the current size eta_j at j.
    Infeasible size (Y_j - eta_j < 0) gives probability 0.
    """
    n = len(series)
    if not (2 <= j <= n):
        raise ValueError(f"j must lie in 2..{n}, got {j}")
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    y = series.values
    delta = np.asarray(delta, dtype=np.int64)
    eta = np.asarray(eta, dtype=np.int64)
    x = y - delta * eta
    p = _delta_prob(j - 1, y, x, params.alpha, params.lam, int(eta[j - 1]), epsilon)
    return OutlierProbability(t=j, p=p)


def _eta_log_weights(
    jj: int,
    y: np.ndarray,
    x: np.ndarray,
    alpha: float,
    lam: float,
    beta: float,
) -> np.ndarray:
    """Unnormalized log pmf of eta_j over 0..Y_j given delta_j = 1."""
    n = y.size
    y_j = int(y[jj])
    x_prev = int(x[jj - 1])
    log_beta = math.log(beta)
    weights = np.empty(y_j + 1)
    has_next = jj + 1 < n
    x_next = int(x[jj + 1]) if has_next else 0
    for e in range(y_j + 1):
        x_j = y_j - e
        w = e * log_beta - beta - math.lgamma(e + 1)
        w += _trans_logpmf(x_prev, x_j, alpha, lam)
        if has_next:
            w += _trans_logpmf(x_j, x_next, alpha, lam)
        weights[e] = w
    return weights


def _poisson_truncated_pmf(beta: float, tail_mass: float = 1e-12) -> FinitePmf:
    """Poisson(beta) truncated where the remaining tail is below ``tail_mass``."""
    probs = [math.exp(-beta)]
    cum = probs[0]
    k = 0
    cap = int(beta + 20.0 * math.sqrt(beta) + 50)
    while 1.0 - cum > tail_mass and k < cap:
        k += 1
        probs.append(probs[-1] * beta / k)
        cum += probs[-1]
    arr = np.array(probs)
    arr /= arr.sum()
    return FinitePmf(support=np.arange(k + 1), probs=arr)


def eta_conditional_pmf(
    j: int,
    series: CountSeries,
    params: InarParams,
    delta: np.ndarray,
    eta: np.ndarray,
    hyper: Hyperparams,
    delta_j: int,
) -> FinitePmf:
    """Conditional pmf of the outlier size at 1-based time j.

    With delta_j = 0 the data carry no information and the pmf is the
    Poisson(beta) prior (truncated at negligible tail mass for representation).
    With delta_j = 1 the support is 0..Y_j (larger sizes imply a negative
    latent count) and each point is weighted by prior times the two affected
    transition probabilities.
    """
    n = len(series)
    if not (2 <= j <= n):
        raise ValueError(f"j must lie in 2..{n}, got {j}")
    if delta_j not in (0, 1):
        raise ValueError(f"delta_j must be 0 or 1, got {delta_j}")
    if delta_j == 0:
        return _poisson_truncated_pmf(hyper.beta)
    y = series.values
    delta = np.asarray(delta, dtype=np.int64)
    eta = np.asarray(eta, dtype=np.int64)
    x = y - delta * eta
    weights = _eta_log_weights(j - 1, y, x, params.alpha, params.lam, hyper.beta)
    peak = weights.max()
    probs = np.exp(weights - peak)
    probs /= probs.sum()
    return FinitePmf(support=np.arange(y[j - 1] + 1), probs=probs)


def epsilon_draw(
    delta: np.ndarray, hyper: Hyperparams, rng: np.random.Generator
) -> float:
    """One conjugate draw of the occurrence probability.

    With k current outliers among the n-1 eligible times, the conditional is
    Beta(h + k, g + n - 1 - k).
    """
    delta = np.asarray(delta, dtype=np.int64)
    if delta[0] != 0:
        raise ValueError("position 0 (time 1) must be clean")
    n = delta.size
    k = int(delta[1:].sum())
    return float(rng.beta(hyper.h + k, hyper.g + (n - 1) - k))
