"""Figure rendering for the report path.

Kept out of the core modules on purpose: only the CLI report path imports
this, so the library proper has no plotting dependency at import time.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_series_and_probabilities(
    values: np.ndarray,
    p_hat: np.ndarray,
    threshold: float,
    flagged: tuple[int, ...],
    path: str | Path,
) -> Path:
    """Two stacked panels: the observed counts and the per-time outlier probability."""
    t = np.arange(1, values.size + 1)
    fig, (ax_top, ax_bottom) = plt.subplots(
        2, 1, figsize=(9, 6), sharex=True, constrained_layout=True
    )
    ax_top.plot(t, values, drawstyle="steps-mid", color="tab:blue", lw=1.0)
    if flagged:
        flagged_idx = np.array(flagged) - 1
        ax_top.plot(
            np.array(flagged), values[flagged_idx], "rv", ms=8, label="flagged"
        )
        ax_top.legend(loc="upper right")
    ax_top.set_ylabel("count")
    ax_top.set_title("observed series")

    markerline, stemlines, _ = ax_bottom.stem(t, p_hat)
    plt.setp(markerline, markersize=2.5, color="tab:blue")
    plt.setp(stemlines, linewidth=0.8, color="tab:blue")
    ax_bottom.axhline(threshold, color="tab:red", ls="--", lw=1.0)
    ax_bottom.set_ylim(0.0, 1.05)
    ax_bottom.set_xlabel("t")
    ax_bottom.set_ylabel("outlier probability")

    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_posterior_histograms(
    alpha_draws: np.ndarray,
    lambda_draws: np.ndarray,
    alpha_hat: float,
    lambda_hat: float,
    path: str | Path,
) -> Path:
    """Posterior histograms of the two model parameters with their means marked."""
    fig, (ax_a, ax_l) = plt.subplots(1, 2, figsize=(9, 3.5), constrained_layout=True)
    ax_a.hist(alpha_draws, bins=25, color="tab:blue", alpha=0.75)
    ax_a.axvline(alpha_hat, color="black", ls=":", lw=1.2)
    ax_a.set_xlabel("alpha")
    ax_a.set_ylabel("draws")
    ax_l.hist(lambda_draws, bins=25, color="tab:orange", alpha=0.75)
    ax_l.axvline(lambda_hat, color="black", ls=":", lw=1.2)
    ax_l.set_xlabel("lambda")
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_report_figures(
    outdir: str | Path,
    values: np.ndarray,
    p_hat: np.ndarray,
    threshold: float,
    flagged: tuple[int, ...],
    alpha_draws: np.ndarray,
    lambda_draws: np.ndarray,
    alpha_hat: float,
    lambda_hat: float,
) -> dict[str, Path]:
    outdir = Path(outdir)
    return {
        "series_phat": plot_series_and_probabilities(
            values, p_hat, threshold, flagged, outdir / "series_phat.png"
        ),
        "posterior": plot_posterior_histograms(
            alpha_draws, lambda_draws, alpha_hat, lambda_hat, outdir / "posterior.png"
        ),
    }
