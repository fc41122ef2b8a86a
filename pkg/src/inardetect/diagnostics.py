"""Descriptive statistics for model identification: moments, ACF, PACF.

The ACF uses the biased (1/n) normalization so the autocorrelation sequence is
positive semidefinite, which keeps the Durbin-Levinson recursion for the PACF
well behaved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateSeriesError
from .process import CountSeries


@dataclass(frozen=True)
class SeriesSummary:
    """Sample moments plus ACF/PACF up to a maximum lag (index = lag)."""

    mean: float
    variance: float
    acf: np.ndarray
    pacf: np.ndarray

    @property
    def dispersion_ratio(self) -> float:
        """Variance over mean; near 1 for an equidispersed (Poisson-like) series."""
        return self.variance / self.mean if self.mean > 0 else float("nan")


def _acf(values: np.ndarray, max_lag: int) -> np.ndarray:
    centered = values - values.mean()
    denom = float(np.dot(centered, centered))
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    for k in range(1, max_lag + 1):
        out[k] = float(np.dot(centered[:-k], centered[k:])) / denom
    return out


def _pacf_durbin_levinson(acf: np.ndarray) -> np.ndarray:
    max_lag = acf.size - 1
    pacf = np.empty(max_lag + 1)
    pacf[0] = 1.0
    if max_lag == 0:
        return pacf
    phi = np.zeros(max_lag + 1)
    phi[1] = acf[1]
    pacf[1] = acf[1]
    denom = 1.0 - acf[1] * acf[1]
    for k in range(2, max_lag + 1):
        if denom < 1e-14:
            pacf[k:] = 0.0
            break
        num = acf[k] - float(np.dot(phi[1:k], acf[k - 1 : 0 : -1]))
        phi_kk = num / denom
        phi[1:k] = phi[1:k] - phi_kk * phi[k - 1 : 0 : -1]
        phi[k] = phi_kk
        pacf[k] = phi_kk
        denom *= 1.0 - phi_kk * phi_kk
    return np.clip(pacf, -1.0, 1.0)


def summarize_series(series: CountSeries, max_lag: int = 10) -> SeriesSummary:
    """Sample mean and variance, ACF, and PACF up to ``max_lag``."""
    values = series.values.astype(np.float64)
    n = values.size
    if not (1 <= max_lag < n / 2):
        raise ValueError(f"need 1 <= max_lag < n/2 = {n / 2}, got {max_lag}")
    if np.all(values == values[0]):
        raise DegenerateSeriesError("constant series: autocorrelation undefined")
    acf = _acf(values, max_lag)
    return SeriesSummary(
        mean=float(values.mean()),
        variance=float(values.var(ddof=1)),
        acf=acf,
        pacf=_pacf_durbin_levinson(acf),
    )
