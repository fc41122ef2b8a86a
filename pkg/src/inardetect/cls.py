"""Conditional least squares estimation of the INAR(1) parameters.

CLS regresses X_t on X_{t-1} with intercept: minimizing the squared one-step
prediction errors sum_{t>=2} (X_t - alpha*X_{t-1} - lam)^2 gives the ordinary
slope/intercept solution.  It ignores outliers entirely, which is what makes it
a useful "before" baseline and a cheap initializer for the Gibbs chain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .exceptions import DegenerateSeriesError, FeasibilityError
from .process import CountSeries

if TYPE_CHECKING:
    from .gibbs import DetectionReport

# Interior box used when a raw fit seeds an MCMC chain.
_ALPHA_MIN, _ALPHA_MAX = 0.01, 0.99
_LAM_MIN = 0.01


@dataclass(frozen=True)
class ClsFit:
    """Raw CLS estimates.  alpha_hat may fall outside [0, 1) for odd series."""

    alpha_hat: float
    lambda_hat: float
    residual_variance: float

    def clamped(self) -> tuple[float, float]:
        """Estimates pulled into the parameter interior, for chain starts."""
        alpha = min(max(self.alpha_hat, _ALPHA_MIN), _ALPHA_MAX)
        lam = max(self.lambda_hat, _LAM_MIN)
        return alpha, lam


def cls_fit(series: CountSeries) -> ClsFit:
    """Closed-form least squares of X_t on X_{t-1} with intercept."""
    x = series.values.astype(np.float64)
    if x.size < 3:
        raise DegenerateSeriesError("CLS needs at least 3 observations")
    prev = x[:-1]
    curr = x[1:]
    prev_var = np.sum((prev - prev.mean()) ** 2)
    if prev_var <= 0.0:
        raise DegenerateSeriesError("constant series: zero predictor variance")
    alpha = float(np.sum((prev - prev.mean()) * (curr - curr.mean())) / prev_var)
    lam = float(curr.mean() - alpha * prev.mean())
    resid = curr - alpha * prev - lam
    return ClsFit(alpha, lam, float(np.mean(resid**2)))


def remove_outliers_and_refit(series: CountSeries, report: "DetectionReport") -> ClsFit:
    """Subtract the estimated outlier sizes at flagged times, then refit CLS."""
    y = series.values.copy()
    for t, size in report.eta_hat.items():
        if y[t - 1] - size < 0:
            raise FeasibilityError(
                f"removing size {size} at t={t} leaves a negative count"
            )
        y[t - 1] -= size
    return cls_fit(CountSeries(y))
