"""End-to-end detection workflow shared by the CLI and the acceptance suite.

Mirrors the modelling loop used on real data: describe the series, fit CLS as
the contaminated baseline, run the Gibbs chain, summarize, then remove the
detected outliers and refit CLS on the cleaned series.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cls import ClsFit, cls_fit, remove_outliers_and_refit
from .diagnostics import SeriesSummary, summarize_series
from .exceptions import DegenerateSeriesError
from .gibbs import ChainTrace, DetectionReport, GibbsConfig, run_chain, summarize
from .process import CountSeries


@dataclass(frozen=True)
class PipelineResult:
    series: CountSeries
    initial_cls: ClsFit
    trace: ChainTrace
    report: DetectionReport
    final_cls: ClsFit
    summary_before: SeriesSummary | None
    summary_after: SeriesSummary | None


def run_pipeline(
    series: CountSeries, config: GibbsConfig, max_lag: int = 10
) -> PipelineResult:
    """Detect outliers and produce before/after fits and diagnostics."""
    initial = cls_fit(series)
    trace = run_chain(series, config)
    report = summarize(trace, config.detection_threshold)
    final = remove_outliers_and_refit(series, report)

    def _try_summary(s: CountSeries) -> SeriesSummary | None:
        try:
            return summarize_series(s, max_lag=max_lag)
        except (DegenerateSeriesError, ValueError):
            return None

    return PipelineResult(
        series=series,
        initial_cls=initial,
        trace=trace,
        report=report,
        final_cls=final,
        summary_before=_try_summary(series),
        summary_after=_try_summary(report.cleaned_series),
    )
