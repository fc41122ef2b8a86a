"""File formats: count CSV ingestion, run configuration, report writers.

All writers are deterministic: fixed column orders, repr-based float
formatting, sorted JSON keys, no timestamps.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cls import ClsFit
from .diagnostics import SeriesSummary
from .exceptions import ConfigError, CsvParseError
from .gibbs import ChainTrace, DetectionReport, GibbsConfig
from .pipeline import PipelineResult
from .posterior import Hyperparams
from .process import Contamination, CountSeries

_INT_RE = re.compile(r"^[+-]?\d+$")

REPORT_FORMATS = ("text", "json", "csv")


# ---------------------------------------------------------------------------
# count CSV


def _parse_int_field(text: str, line_no: int, what: str) -> int:
    text = text.strip()
    if not _INT_RE.match(text):
        raise CsvParseError(f"{what} {text!r} is not an integer", line_no)
    return int(text)


def parse_count_csv(path: str | Path) -> CountSeries:
    """Read counts from a one-column or (index, count) two-column CSV.

    An optional header is allowed on the first line.  Floats, negative counts,
    and gaps in the index column are rejected with the offending line number.
    """
    lines = Path(path).read_text().splitlines()
    counts: list[int] = []
    n_cols: int | None = None
    expected_index: int | None = None
    first_data_line = True
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) not in (1, 2):
            raise CsvParseError(
                f"expected 1 or 2 columns, found {len(fields)}", line_no
            )
        if first_data_line and not all(_INT_RE.match(f) for f in fields):
            first_data_line = False  # header row
            n_cols = len(fields)
            continue
        if n_cols is None:
            n_cols = len(fields)
        elif len(fields) != n_cols:
            raise CsvParseError(
                f"expected {n_cols} columns, found {len(fields)}", line_no
            )
        first_data_line = False
        if n_cols == 2:
            index = _parse_int_field(fields[0], line_no, "index")
            if expected_index is None:
                if index not in (0, 1):
                    raise CsvParseError(f"index must start at 0 or 1, got {index}", line_no)
            elif index != expected_index:
                raise CsvParseError(
                    f"index gap: expected {expected_index}, got {index}", line_no
                )
            expected_index = index + 1
            count_text = fields[1]
        else:
            count_text = fields[0]
        count = _parse_int_field(count_text, line_no, "count")
        if count < 0:
            raise CsvParseError(f"negative count {count}", line_no)
        counts.append(count)
    if len(counts) < 2:
        raise CsvParseError(f"need at least 2 counts, found {len(counts)}")
    return CountSeries(np.asarray(counts, dtype=np.int64))


def write_series_csv(path: str | Path, values: np.ndarray) -> None:
    rows = [f"{t},{int(v)}" for t, v in enumerate(values, start=1)]
    Path(path).write_text("t,count\n" + "\n".join(rows) + "\n")


def write_phat_csv(path: str | Path, p_hat: np.ndarray) -> None:
    rows = [f"{t},{float(p)!r}" for t, p in enumerate(p_hat, start=1)]
    Path(path).write_text("t,p_hat\n" + "\n".join(rows) + "\n")


def write_trace_csv(path: str | Path, trace: ChainTrace) -> None:
    rows = [
        f"{int(it)},{a!r},{l!r},{e!r}"
        for it, a, l, e in zip(trace.iterations, trace.alpha, trace.lam, trace.epsilon)
    ]
    Path(path).write_text("iteration,alpha,lambda,epsilon\n" + "\n".join(rows) + "\n")


def read_phat_csv(path: str | Path) -> np.ndarray:
    lines = Path(path).read_text().splitlines()
    return np.array([float(line.split(",")[1]) for line in lines[1:]])


def read_trace_csv(path: str | Path) -> dict[str, np.ndarray]:
    lines = Path(path).read_text().splitlines()
    cols = lines[0].split(",")
    data = np.array([[float(f) for f in line.split(",")] for line in lines[1:]])
    return {name: data[:, k] for k, name in enumerate(cols)}


# ---------------------------------------------------------------------------
# run configuration


@dataclass(frozen=True)
class SimulationSpec:
    """Inline generation: INAR(1) parameters plus planted outliers."""

    alpha: float
    lam: float
    n: int
    outliers: tuple[tuple[int, int], ...] = ()

    def contamination(self) -> Contamination:
        return Contamination(
            times=tuple(t for t, _ in self.outliers),
            sizes=tuple(s for _, s in self.outliers),
        )


@dataclass(frozen=True)
class RunConfig:
    """Everything one detection run needs; exactly one input source."""

    seed: int
    input_path: Path | None = None
    simulation: SimulationSpec | None = None
    burn_in: int = 2500
    post_burn: int = 2500
    thin: int = 5
    a: float = 0.001
    b: float = 0.001
    c: float = 0.001
    d: float = 0.001
    h: float = 5.0
    g: float = 95.0
    beta: float = 30.0
    beta_mode: str = "non-informative"
    threshold: float = 0.5
    output_dir: Path = field(default_factory=lambda: Path("."))
    report_format: str = "text"
    max_lag: int = 10
    figures: bool = True

    def __post_init__(self):
        if (self.input_path is None) == (self.simulation is None):
            raise ConfigError("exactly one of an input path or a simulation spec is required")
        if self.report_format not in REPORT_FORMATS:
            raise ConfigError(
                f"format must be one of {REPORT_FORMATS}, got {self.report_format!r}"
            )

    def hyperparams(self) -> Hyperparams:
        return Hyperparams(
            a=self.a, b=self.b, c=self.c, d=self.d, h=self.h, g=self.g, beta=self.beta
        )

    def gibbs_config(self) -> GibbsConfig:
        return GibbsConfig(
            burn_in=self.burn_in,
            post_burn=self.post_burn,
            thin=self.thin,
            seed=self.seed,
            hyper=self.hyperparams(),
            detection_threshold=self.threshold,
            beta_mode=self.beta_mode,
        )


def parse_outlier_list(text: str) -> tuple[tuple[int, int], ...]:
    """Parse 't:size[,t:size...]' into outlier pairs."""
    pairs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            t_text, s_text = item.split(":")
            pairs.append((int(t_text), int(s_text)))
        except ValueError as exc:
            raise ConfigError(f"bad outlier {item!r}, expected 't:size'") from exc
    return tuple(pairs)


def read_config_file(path: str | Path) -> dict[str, str]:
    """Read a flat key=value config file ('#' starts a comment)."""
    values: dict[str, str] = {}
    for line_no, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: line {line_no}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


_CONFIG_KEYS = {
    "input": str,
    "sim_alpha": float,
    "sim_lambda": float,
    "sim_n": int,
    "sim_outliers": str,
    "seed": int,
    "burn_in": int,
    "post_burn": int,
    "thin": int,
    "a": float,
    "b": float,
    "c": float,
    "d": float,
    "h": float,
    "g": float,
    "beta": float,
    "beta_mode": str,
    "threshold": float,
    "output_dir": str,
    "format": str,
    "max_lag": int,
    "figures": bool,
}


def _coerce(key: str, value: str):
    kind = _CONFIG_KEYS[key]
    try:
        if kind is bool:
            lowered = value.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        return kind(value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc


def build_run_config(
    file_values: dict[str, str] | None, overrides: dict[str, object]
) -> RunConfig:
    """Merge config-file values with flag overrides (flags win) into a RunConfig."""
    merged: dict[str, object] = {}
    for key, value in (file_values or {}).items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        merged[key] = _coerce(key, value)
    for key, value in overrides.items():
        if value is not None:
            merged[key] = value

    if "seed" not in merged:
        raise ConfigError("seed is required (config key 'seed' or --seed flag)")
    sim_keys = {"sim_alpha", "sim_lambda", "sim_n"}
    has_sim = any(k in merged for k in sim_keys)
    kwargs: dict[str, object] = {"seed": merged["seed"]}
    if "input" in merged and merged["input"]:
        kwargs["input_path"] = Path(str(merged["input"]))
    if has_sim:
        missing = sorted(sim_keys - merged.keys())
        if missing:
            raise ConfigError(f"incomplete simulation spec, missing {missing}")
        outliers = merged.get("sim_outliers", ())
        if isinstance(outliers, str):
            outliers = parse_outlier_list(outliers)
        kwargs["simulation"] = SimulationSpec(
            alpha=float(merged["sim_alpha"]),
            lam=float(merged["sim_lambda"]),
            n=int(merged["sim_n"]),
            outliers=tuple(outliers),
        )
    passthrough = (
        "burn_in", "post_burn", "thin", "a", "b", "c", "d", "h", "g", "beta",
        "beta_mode", "threshold", "max_lag", "figures",
    )
    for key in passthrough:
        if key in merged:
            kwargs[key] = merged[key]
    if "output_dir" in merged:
        kwargs["output_dir"] = Path(str(merged["output_dir"]))
    if "format" in merged:
        kwargs["report_format"] = merged["format"]
    return RunConfig(**kwargs)


# ---------------------------------------------------------------------------
# report payload and writers


def _finite_or_none(value: float) -> float | None:
    return value if math.isfinite(value) else None


def _cls_payload(fit: ClsFit) -> dict:
    return {
        "alpha": fit.alpha_hat,
        "lambda": fit.lambda_hat,
        "residual_variance": fit.residual_variance,
    }


def _summary_payload(summary: SeriesSummary | None) -> dict | None:
    if summary is None:
        return None
    return {
        "mean": summary.mean,
        "variance": summary.variance,
        "acf": [float(v) for v in summary.acf],
        "pacf": [float(v) for v in summary.pacf],
    }


def build_report_payload(
    result: PipelineResult,
    run_config: RunConfig | None = None,
    truth: dict | None = None,
) -> dict:
    """Assemble the structured report written to report.json."""
    report = result.report
    config: GibbsConfig = result.trace.config
    payload = {
        "n": len(result.series),
        "config": {
            "burn_in": config.burn_in,
            "post_burn": config.post_burn,
            "thin": config.thin,
            "seed": config.seed,
            "threshold": report.threshold,
            "beta_mode": config.beta_mode,
            "beta_used": result.trace.beta_used,
            "hyper": {
                "a": config.hyper.a,
                "b": config.hyper.b,
                "c": config.hyper.c,
                "d": config.hyper.d,
                "h": config.hyper.h,
                "g": config.hyper.g,
                "beta": config.hyper.beta,
            },
        },
        "estimates": {
            "initial_cls": _cls_payload(result.initial_cls),
            "final_bayes": {
                "alpha": report.alpha_hat,
                "lambda": report.lambda_hat,
                "epsilon": report.epsilon_hat,
            },
            "final_cls": _cls_payload(result.final_cls),
        },
        "outliers": [
            {
                "t": t,
                "p_hat": float(report.p_hat[t - 1]),
                "size": report.eta_hat[t],
            }
            for t in report.flagged
        ],
        "diagnostics": {
            "before": _summary_payload(result.summary_before),
            "after": _summary_payload(result.summary_after),
        },
        "geweke_z": {k: _finite_or_none(v) for k, v in report.geweke_z.items()},
        "retained_draws": len(result.trace),
    }
    if run_config is not None:
        payload["input"] = (
            str(run_config.input_path) if run_config.input_path else "simulated"
        )
    if truth is not None:
        payload["truth"] = truth
    return payload


def write_report_json(path: str | Path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def format_report_text(payload: dict) -> str:
    """Render the human-readable report table."""
    est = payload["estimates"]
    lines = [
        "INAR(1) additive outlier detection",
        "==================================",
        f"observations: {payload['n']}    seed: {payload['config']['seed']}"
        f"    retained draws: {payload['retained_draws']}",
        f"chain: burn-in {payload['config']['burn_in']}, post-burn "
        f"{payload['config']['post_burn']}, thin {payload['config']['thin']}",
        f"size prior: beta={payload['config']['beta_used']:.4g} "
        f"({payload['config']['beta_mode']})",
        "",
        "parameter    initial CLS    final Bayes    final CLS",
        f"alpha        {est['initial_cls']['alpha']:>11.4f}    "
        f"{est['final_bayes']['alpha']:>11.4f}    {est['final_cls']['alpha']:>9.4f}",
        f"lambda       {est['initial_cls']['lambda']:>11.4f}    "
        f"{est['final_bayes']['lambda']:>11.4f}    {est['final_cls']['lambda']:>9.4f}",
        f"epsilon      {'-':>11}    {est['final_bayes']['epsilon']:>11.4f}    {'-':>9}",
        "",
    ]
    threshold = payload["config"]["threshold"]
    if payload["outliers"]:
        lines.append(f"flagged outliers (posterior probability > {threshold:g})")
        lines.append("  t      p_hat    size")
        for o in payload["outliers"]:
            lines.append(f"  {o['t']:<5}  {o['p_hat']:>5.3f}    {o['size']}")
    else:
        lines.append(f"no time point exceeds the probability threshold {threshold:g}")
    lines.append("")
    before = payload["diagnostics"]["before"]
    after = payload["diagnostics"]["after"]
    if before is not None:
        lines.append(
            f"series     mean {before['mean']:.4f}  variance {before['variance']:.4f}"
            f"  acf[1] {before['acf'][1]:.4f}  pacf[1] {before['pacf'][1]:.4f}"
        )
    if after is not None:
        lines.append(
            f"cleaned    mean {after['mean']:.4f}  variance {after['variance']:.4f}"
            f"  acf[1] {after['acf'][1]:.4f}  pacf[1] {after['pacf'][1]:.4f}"
        )
    gz = payload["geweke_z"]
    rendered = "  ".join(
        f"{k} {v:+.3f}" if v is not None else f"{k} n/a" for k, v in sorted(gz.items())
    )
    lines.append(f"Geweke z (first 10% vs last 50%): {rendered}")
    if "truth" in payload:
        planted = ", ".join(
            f"t={t} size={s}" for t, s in payload["truth"].get("outliers", [])
        )
        lines.append(f"planted outliers: {planted or 'none'}")
    lines.append("")
    return "\n".join(lines)


def format_report_csv(payload: dict) -> str:
    """Flat CSV rendering of the flagged outliers (for --format csv stdout)."""
    lines = ["t,p_hat,size"]
    for o in payload["outliers"]:
        lines.append(f"{o['t']},{o['p_hat']!r},{o['size']}")
    return "\n".join(lines) + "\n"


def write_detection_outputs(
    outdir: str | Path,
    result: PipelineResult,
    payload: dict,
) -> dict[str, Path]:
    """Write the delimited outputs and the reports; returns the paths written."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "series": outdir / "series.csv",
        "phat": outdir / "phat.csv",
        "trace": outdir / "trace.csv",
        "cleaned": outdir / "cleaned.csv",
        "report_json": outdir / "report.json",
        "report_txt": outdir / "report.txt",
    }
    write_series_csv(paths["series"], result.series.values)
    write_phat_csv(paths["phat"], result.report.p_hat)
    write_trace_csv(paths["trace"], result.trace)
    write_series_csv(paths["cleaned"], result.report.cleaned_series.values)
    write_report_json(paths["report_json"], payload)
    paths["report_txt"].write_text(format_report_text(payload))
    return paths
