"""Command-line interface: simulate, contaminate, detect, report.

Exit codes: 0 success (whether or not outliers were found), 2 validation or
configuration failure, 3 I/O failure, 4 numerical failure.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np

from . import io as iomod
from .exceptions import (
    ConfigError,
    CsvParseError,
    DegenerateSeriesError,
    FeasibilityError,
    NumericalError,
    SeriesValidationError,
)
from .pipeline import run_pipeline
from .process import Contamination, CountSeries, InarParams, contaminate, simulate

EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4

_VALIDATION_ERRORS = (
    ConfigError,
    CsvParseError,
    DegenerateSeriesError,
    FeasibilityError,
    SeriesValidationError,
    ValueError,
)


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guarded(fn):
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _VALIDATION_ERRORS as exc:
            _fail(EXIT_VALIDATION, str(exc))
        except NumericalError as exc:
            _fail(EXIT_NUMERICAL, str(exc))
        except OSError as exc:
            _fail(EXIT_IO, str(exc))

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@click.group()
def main():
    """Additive-outlier detection for Poisson INAR(1) count series."""


@main.command()
@click.option("--alpha", type=float, required=True, help="Thinning probability in [0, 1].")
@click.option("--lam", "--lambda", "lam", type=float, required=True, help="Innovation mean.")
@click.option("--n", type=int, required=True, help="Series length.")
@click.option(
    "--outlier", "outliers", multiple=True, metavar="T:SIZE",
    help="Planted outlier, repeatable (times must be >= 2).",
)
@click.option("--seed", type=int, required=True, help="RNG seed (no wall-clock seeding).")
@click.option(
    "--out", "outdir", type=click.Path(path_type=Path), envvar="INARDETECT_OUTDIR",
    default=Path("."), show_default=True, help="Output directory.",
)
@_guarded
def simulate_cmd(alpha, lam, n, outliers, seed, outdir):
    """Simulate a series and write clean.csv, series.csv, outliers.csv."""
    pairs = []
    for spec in outliers:
        pairs.extend(iomod.parse_outlier_list(spec))
    pairs.sort()
    contamination = Contamination(
        times=tuple(t for t, _ in pairs), sizes=tuple(s for _, s in pairs)
    )
    rng = np.random.default_rng(seed)
    clean = simulate(InarParams(alpha=alpha, lam=lam), n, rng)
    observed = contaminate(clean, contamination)
    outdir.mkdir(parents=True, exist_ok=True)
    iomod.write_series_csv(outdir / "clean.csv", clean.values)
    iomod.write_series_csv(outdir / "series.csv", observed.values)
    rows = [f"{t},{s}" for t, s in pairs]
    (outdir / "outliers.csv").write_text("t,size\n" + "\n".join(rows) + ("\n" if rows else ""))
    click.echo(f"wrote clean.csv, series.csv, outliers.csv to {outdir}")


main.add_command(simulate_cmd, name="simulate")


@main.command()
@click.option("--input", "input_path", type=click.Path(path_type=Path), required=True)
@click.option("--outlier", "outliers", multiple=True, metavar="T:SIZE", required=True)
@click.option(
    "--output", type=click.Path(path_type=Path), required=True,
    help="Contaminated series CSV to write.",
)
@_guarded
def contaminate_cmd(input_path, outliers, output):
    """Add outliers to an existing series file."""
    series = iomod.parse_count_csv(input_path)
    pairs = []
    for spec in outliers:
        pairs.extend(iomod.parse_outlier_list(spec))
    pairs.sort()
    contamination = Contamination(
        times=tuple(t for t, _ in pairs), sizes=tuple(s for _, s in pairs)
    )
    observed = contaminate(series, contamination)
    output.parent.mkdir(parents=True, exist_ok=True)
    iomod.write_series_csv(output, observed.values)
    click.echo(f"wrote {output}")


main.add_command(contaminate_cmd, name="contaminate")


@main.command()
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help="Flat key=value config file; flags override it.")
@click.option("--input", "input_path", type=click.Path(path_type=Path), default=None)
@click.option("--sim-alpha", type=float, default=None)
@click.option("--sim-lambda", "sim_lambda", type=float, default=None)
@click.option("--sim-n", type=int, default=None)
@click.option("--sim-outlier", "sim_outliers", multiple=True, metavar="T:SIZE")
@click.option("--seed", type=int, default=None)
@click.option("--burn-in", type=int, default=None)
@click.option("--post-burn", type=int, default=None)
@click.option("--thin", type=int, default=None)
@click.option("--a", type=float, default=None)
@click.option("--b", type=float, default=None)
@click.option("--c", type=float, default=None)
@click.option("--d", type=float, default=None)
@click.option("--h", type=float, default=None)
@click.option("--g", type=float, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--beta-mode", type=click.Choice(["non-informative", "informative"]), default=None)
@click.option("--threshold", type=float, default=None)
@click.option("--out", "output_dir", type=click.Path(path_type=Path), default=None,
              envvar="INARDETECT_OUTDIR")
@click.option("--format", "report_format", type=click.Choice(list(iomod.REPORT_FORMATS)),
              default=None, help="Stdout rendering; all files are always written.")
@click.option("--max-lag", type=int, default=None)
@click.option("--figures/--no-figures", "figures", default=None)
@_guarded
def detect_cmd(config_path, input_path, sim_alpha, sim_lambda, sim_n, sim_outliers,
               seed, burn_in, post_burn, thin, a, b, c, d, h, g, beta, beta_mode,
               threshold, output_dir, report_format, max_lag, figures):
    """Run the detection pipeline and write reports, CSV outputs, and figures."""
    file_values = iomod.read_config_file(config_path) if config_path else None
    sim_pairs = None
    if sim_outliers:
        collected = []
        for spec in sim_outliers:
            collected.extend(iomod.parse_outlier_list(spec))
        sim_pairs = tuple(sorted(collected))
    overrides = {
        "input": str(input_path) if input_path else None,
        "sim_alpha": sim_alpha,
        "sim_lambda": sim_lambda,
        "sim_n": sim_n,
        "sim_outliers": sim_pairs,
        "seed": seed,
        "burn_in": burn_in,
        "post_burn": post_burn,
        "thin": thin,
        "a": a, "b": b, "c": c, "d": d, "h": h, "g": g, "beta": beta,
        "beta_mode": beta_mode,
        "threshold": threshold,
        "output_dir": str(output_dir) if output_dir else None,
        "format": report_format,
        "max_lag": max_lag,
        "figures": figures,
    }
    run_config = iomod.build_run_config(file_values, overrides)

    truth = None
    if run_config.simulation is not None:
        spec = run_config.simulation
        rng = np.random.default_rng(run_config.seed)
        clean = simulate(InarParams(alpha=spec.alpha, lam=spec.lam), spec.n, rng)
        series = contaminate(clean, spec.contamination())
        truth = {
            "alpha": spec.alpha,
            "lambda": spec.lam,
            "outliers": [list(pair) for pair in spec.outliers],
        }
    else:
        series = iomod.parse_count_csv(run_config.input_path)

    result = run_pipeline(series, run_config.gibbs_config(), max_lag=run_config.max_lag)
    payload = iomod.build_report_payload(result, run_config, truth)
    paths = iomod.write_detection_outputs(run_config.output_dir, result, payload)
    if run_config.simulation is not None:
        iomod.write_series_csv(run_config.output_dir / "clean.csv", clean.values)

    if run_config.figures:
        from . import plots

        plots.render_report_figures(
            run_config.output_dir,
            result.series.values,
            result.report.p_hat,
            result.report.threshold,
            result.report.flagged,
            result.trace.alpha,
            result.trace.lam,
            result.report.alpha_hat,
            result.report.lambda_hat,
        )

    if run_config.report_format == "json":
        click.echo(paths["report_json"].read_text(), nl=False)
    elif run_config.report_format == "csv":
        click.echo(iomod.format_report_csv(payload), nl=False)
    else:
        click.echo(paths["report_txt"].read_text(), nl=False)


main.add_command(detect_cmd, name="detect")


@main.command()
@click.option(
    "--from", "source_dir", type=click.Path(path_type=Path), required=True,
    help="Directory written by a previous detect run.",
)
@click.option("--format", "report_format", type=click.Choice(list(iomod.REPORT_FORMATS)),
              default="text")
@click.option("--figures/--no-figures", "figures", default=True)
@_guarded
def report_cmd(source_dir, report_format, figures):
    """Re-render report.txt and the figures from a detect output directory."""
    import json

    payload = json.loads((source_dir / "report.json").read_text())
    series = iomod.parse_count_csv(source_dir / "series.csv")
    p_hat = iomod.read_phat_csv(source_dir / "phat.csv")
    trace_cols = iomod.read_trace_csv(source_dir / "trace.csv")
    (source_dir / "report.txt").write_text(iomod.format_report_text(payload))
    if figures:
        from . import plots

        plots.render_report_figures(
            source_dir,
            series.values,
            p_hat,
            payload["config"]["threshold"],
            tuple(o["t"] for o in payload["outliers"]),
            trace_cols["alpha"],
            trace_cols["lambda"],
            payload["estimates"]["final_bayes"]["alpha"],
            payload["estimates"]["final_bayes"]["lambda"],
        )
    if report_format == "json":
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    elif report_format == "csv":
        click.echo(iomod.format_report_csv(payload), nl=False)
    else:
        click.echo(iomod.format_report_text(payload), nl=False)


main.add_command(report_cmd, name="report")


if __name__ == "__main__":
    main()
