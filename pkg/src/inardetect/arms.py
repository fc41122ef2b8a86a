"""Adaptive Rejection Metropolis Sampling for univariate log densities.

One call draws one value from an unnormalized log kernel on an open interval.
The envelope is the secant-based pseudo-hull of Gilks and Best: between
adjacent abscissae the upper function is max(chord, min(extended left secant,
extended right secant)), piecewise linear in log space and therefore piecewise
exponential in density space.  Rejected proposals refine the envelope within
the call; nothing persists across calls because the Gibbs conditionals change
every iteration.

For non-log-concave targets the envelope need not dominate, so every
envelope-accepted proposal passes through a Metropolis accept/reject against
the current value; that step is what makes the draw exact.  For log-concave
targets the hull does dominate and the Metropolis step accepts with
probability one.
"""

from __future__ import annotations

import math
from bisect import insort
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import ArmsInitializationError

_NEG_INF = float("-inf")
_INIT_QUANTILES = (0.1, 0.3, 0.5, 0.7, 0.9)
_FLAT_SLOPE = 1e-12


def _line(x0: float, h0: float, x1: float, h1: float) -> tuple[float, float]:
    slope = (h1 - h0) / (x1 - x0)
    return slope, h0 - slope * x0


def _crossing(a: tuple[float, float], b: tuple[float, float]) -> float | None:
    if a[0] == b[0]:
        return None
    return (b[1] - a[1]) / (a[0] - b[0])


@dataclass
class ArmsEnvelope:
    """Piecewise-linear upper construction over an open interval.

    ``hull`` is a list of (left, right, slope, intercept) segments tiling
    (lower, upper); the upper function at x in a segment is
    slope * x + intercept.
    """

    abscissae: list[float]
    log_values: list[float]
    lower: float
    upper: float
    hull: list[tuple[float, float, float, float]] = field(default_factory=list)

    @classmethod
    def build(cls, xs: list[float], hs: list[float], lower: float, upper: float) -> "ArmsEnvelope":
        if len(xs) < 2:
            raise ArmsInitializationError("envelope needs at least 2 finite support points")
        env = cls(abscissae=list(xs), log_values=list(hs), lower=lower, upper=upper)
        env._rebuild()
        return env

    def _rebuild(self) -> None:
        xs, hs = self.abscissae, self.log_values
        m = len(xs)
        secants = [_line(xs[k], hs[k], xs[k + 1], hs[k + 1]) for k in range(m - 1)]
        segments: list[tuple[float, float, float, float]] = []

        def add(left: float, right: float, ln: tuple[float, float]) -> None:
            if right - left > 0.0:
                segments.append((left, right, ln[0], ln[1]))

        add(self.lower, xs[0], secants[0])
        for k in range(m - 1):
            left_x, right_x = xs[k], xs[k + 1]
            chord = secants[k]
            roof = [s for s in (secants[k - 1] if k >= 1 else None,
                                secants[k + 1] if k + 1 <= m - 2 else None)
                    if s is not None]
            if not roof:
                add(left_x, right_x, chord)
                continue
            candidates = [chord] + roof
            breaks = sorted(
                c for a in candidates for b in candidates
                for c in (_crossing(a, b),)
                if c is not None and left_x < c < right_x
            )
            edges = [left_x] + breaks + [right_x]
            for lo, hi in zip(edges[:-1], edges[1:]):
                mid = 0.5 * (lo + hi)
                roof_vals = [s[0] * mid + s[1] for s in roof]
                roof_min = min(range(len(roof)), key=roof_vals.__getitem__)
                if chord[0] * mid + chord[1] >= roof_vals[roof_min]:
                    add(lo, hi, chord)
                else:
                    add(lo, hi, roof[roof_min])
        add(xs[-1], self.upper, secants[-1])
        self.hull = segments

    def log_upper(self, x: float) -> float:
        for _, right, slope, intercept in self.hull:
            if x <= right:
                return slope * x + intercept
        _, _, slope, intercept = self.hull[-1]
        return slope * x + intercept

    def insert(self, x: float, h: float) -> None:
        span = self.upper - self.lower
        if min(abs(x - p) for p in self.abscissae) < 1e-12 * span:
            return
        insort(self.abscissae, x)
        self.log_values.insert(self.abscissae.index(x), h)
        self._rebuild()

    def sample(self, rng: np.random.Generator) -> float:
        """Draw from the piecewise-exponential density exp(upper function)."""
        log_masses = []
        for left, right, slope, intercept in self.hull:
            width = right - left
            if abs(slope) * width < _FLAT_SLOPE:
                lm = intercept + slope * 0.5 * (left + right) + math.log(width)
            elif slope > 0.0:
                lm = intercept + slope * right + math.log1p(-math.exp(-slope * width)) - math.log(slope)
            else:
                lm = intercept + slope * left + math.log1p(-math.exp(slope * width)) - math.log(-slope)
            log_masses.append(lm)
        peak = max(log_masses)
        weights = np.exp(np.asarray(log_masses) - peak)
        total = float(weights.sum())
        target = rng.random() * total
        cum = 0.0
        idx = len(weights) - 1
        for k, w in enumerate(weights):
            cum += w
            if target <= cum:
                idx = k
                break
        left, right, slope, _ = self.hull[idx]
        v = rng.random()
        width = right - left
        if abs(slope) * width < _FLAT_SLOPE:
            x = left + v * width
        elif slope > 0.0:
            x = right + math.log(v + (1.0 - v) * math.exp(-slope * width)) / slope
        else:
            x = left + math.log(1.0 - v + v * math.exp(slope * width)) / slope
        lo_in = math.nextafter(left, right)
        hi_in = math.nextafter(right, left)
        return min(max(x, lo_in), hi_in)


@dataclass
class ArmsStats:
    """Per-call instrumentation, mainly for tests."""

    envelope_rejections: int = 0
    metropolis_accepted: bool = False
    used_fallback: bool = False


def _working_bounds(domain: tuple[float, float], current: float) -> tuple[float, float]:
    lower, upper = domain
    if not math.isfinite(upper):
        upper = max(50.0, 10.0 * abs(current))
    if not math.isfinite(lower):
        lower = min(-50.0, -10.0 * abs(current))
    if not lower < current < upper:
        raise ValueError(f"current value {current} outside working domain ({lower}, {upper})")
    return lower, upper


def _safe_eval(log_kernel: Callable[[float], float], x: float) -> float:
    value = log_kernel(x)
    if not math.isfinite(value):
        return _NEG_INF
    return value


def _arms_draw_with_stats(
    log_kernel: Callable[[float], float],
    domain: tuple[float, float],
    current: float,
    rng: np.random.Generator,
    init: list[float] | None = None,
    max_rejections: int = 500,
) -> tuple[float, ArmsStats]:
    stats = ArmsStats()
    lower, upper = _working_bounds(domain, current)
    span = upper - lower
    if init is None:
        points = [lower + q * span for q in _INIT_QUANTILES]
        if min(abs(current - p) for p in points) > span / 20.0:
            points.append(current)
    else:
        points = [float(p) for p in init if lower < p < upper]
    points = sorted(set(points))
    pairs = [(x, _safe_eval(log_kernel, x)) for x in points]
    finite = [(x, h) for x, h in pairs if h > _NEG_INF]
    if len(finite) < 2:
        raise ArmsInitializationError(
            "log kernel is -inf at (nearly) all initial abscissae"
        )
    env = ArmsEnvelope.build([x for x, _ in finite], [h for _, h in finite], lower, upper)
    h_cur = _safe_eval(log_kernel, current)

    while stats.envelope_rejections < max_rejections:
        x_prop = env.sample(rng)
        h_prop = _safe_eval(log_kernel, x_prop)
        if h_prop == _NEG_INF:
            stats.envelope_rejections += 1
            continue
        u_prop = env.log_upper(x_prop)
        if math.log(rng.random()) > h_prop - u_prop:
            stats.envelope_rejections += 1
            env.insert(x_prop, h_prop)
            continue
        # Metropolis correction: exact even when the hull fails to dominate
        if h_cur == _NEG_INF:
            stats.metropolis_accepted = True
            return x_prop, stats
        u_cur = env.log_upper(current)
        log_ratio = (h_prop + min(h_cur, u_cur)) - (h_cur + min(h_prop, u_prop))
        if log_ratio >= 0.0 or math.log(rng.random()) <= log_ratio:
            stats.metropolis_accepted = True
            return x_prop, stats
        return current, stats

    # liveness fallback: one symmetric random-walk Metropolis step
    stats.used_fallback = True
    x_prop = current + (span / 20.0) * rng.standard_normal()
    if lower < x_prop < upper:
        h_prop = _safe_eval(log_kernel, x_prop)
        if h_prop > _NEG_INF and (
            h_prop >= h_cur or math.log(rng.random()) <= h_prop - h_cur
        ):
            stats.metropolis_accepted = True
            return x_prop, stats
    return current, stats


def arms_draw(
    log_kernel: Callable[[float], float],
    domain: tuple[float, float],
    current: float,
    rng: np.random.Generator,
    *,
    init: list[float] | None = None,
    max_rejections: int = 500,
) -> float:
    """Draw one value whose Markov kernel leaves the target invariant.

    Parameters
    ----------
    log_kernel : callable
        Unnormalized log density.  Non-finite values are treated as -inf.
    domain : (lower, upper)
        Open interval; an infinite bound is replaced by a working bound of
        max(50, 10 * |current|) on that side.
    current : float
        Current chain value, strictly inside the domain.
    rng : numpy Generator
    init : optional list of initial abscissae
        Defaults to five quantile-spread points plus the current value when it
        is distant from all of them.
    max_rejections : int
        Envelope rejections allowed before falling back to one symmetric
        random-walk Metropolis step.
    """
    value, _ = _arms_draw_with_stats(
        log_kernel, domain, current, rng, init=init, max_rejections=max_rejections
    )
    return value
