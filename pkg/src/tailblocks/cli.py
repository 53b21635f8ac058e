"""Command-line front end: data ingestion, experiment runs, CSV/SVG artifacts.

Subcommands: simulate, scaling, estimate, trace, qq, compare. Every analysis
command takes its sample either from a CSV file (--input) or from a seeded
simulation (--process plus parameters), never both. Artifacts are whole-file
atomic and byte-reproducible for a fixed configuration and seed; every SVG
has a CSV twin holding the exact plotted numbers.

Exit status: 0 success, 2 usage error, 3 data error, 4 estimation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, EstimationError
from .estimators import estimator_trace, fit_tail_index, qq_points
from .scaling import asymptotic_scaling_function, build_scaling_curve, default_q_grid
from .series import TimeSeries, demean
from .simulate import PROCESS_NAMES, SimulationSpec, run_simulation
from .svgplot import line_plot

SEED_ENV_VAR = "TAILBLOCKS_SEED"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_ESTIMATION = 4


class UsageError(ValueError):
    """Invalid command-line or config-file combination."""


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"expected a boolean, got {text!r}")


# name -> (converter, built-in default); config-file keys use these names.
_OPTIONS = {
    "seed": (int, 0),
    "stream": (int, 0),
    "out": (str, "."),
    "format": (str, "both"),
    "input": (str, None),
    "column": (str, None),
    "process": (str, None),
    "n": (int, 1000),
    "alpha": (float, None),
    "beta": (float, 0.0),
    "scale": (float, 1.0),
    "location": (float, 0.0),
    "nu": (float, None),
    "delta": (float, 1.0),
    "mu": (float, 0.0),
    "lam": (float, None),
    "theta": (float, None),
    "substeps": (int, 100),
    "burn_in": (int, None),
    "demean": (_parse_bool, True),
    "q_max": (float, 8.0),
    "num_q": (int, 40),
    "s_grid": (int, 20),
    "min_blocks": (int, 5),
    "branch": (str, "auto"),
    "estimator": (str, "hill"),
    "k": (int, None),
    "k_min": (int, None),
    "k_max": (int, None),
    "stride": (int, 1),
    "absolute": (_parse_bool, False),
    "formula": (str, "standard"),
    "overlay_alpha": (float, None),
    "overlay_fit": (_parse_bool, False),
}


@dataclass
class RunConfig:
    """Fully resolved settings for one command invocation."""

    command: str
    settings: dict

    def __getattr__(self, name):
        try:
            return self.settings[name]
        except KeyError:
            raise AttributeError(name) from None


def parse_config_file(path: str) -> dict:
    """Read a plain key=value config file (hash comments, blank lines allowed)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise DataError(f"cannot read config file {path}: {err}") from err
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _OPTIONS:
            raise UsageError(f"{path}:{lineno}: unknown option {key!r}")
        values[key] = value.strip()
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge flags over config-file values over built-in defaults.

    The environment variable TAILBLOCKS_SEED overrides only the built-in
    default seed; explicit flags and config entries still win.
    """
    file_values = parse_config_file(args.config) if getattr(args, "config", None) else {}
    settings = {}
    for name, (convert, default) in _OPTIONS.items():
        cli_value = getattr(args, name, None)
        if cli_value is not None:
            settings[name] = cli_value
        elif name in file_values:
            settings[name] = convert(file_values[name])
        elif name == "seed" and SEED_ENV_VAR in os.environ:
            try:
                settings[name] = int(os.environ[SEED_ENV_VAR])
            except ValueError as err:
                raise UsageError(f"{SEED_ENV_VAR} must be an integer") from err
        else:
            settings[name] = default
    cfg = RunConfig(command=args.command, settings=settings)
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: RunConfig) -> None:
    if cfg.format not in ("csv", "svg", "both"):
        raise UsageError(f"format must be csv, svg or both, got {cfg.format!r}")
    if cfg.branch not in ("auto", "le2", "gt2"):
        raise UsageError(f"branch must be auto, le2 or gt2, got {cfg.branch!r}")
    if cfg.process is not None and cfg.process not in PROCESS_NAMES:
        raise UsageError(f"process must be one of {', '.join(PROCESS_NAMES)}")
    has_input = cfg.input is not None
    has_process = cfg.process is not None
    if cfg.command == "simulate":
        if not has_process:
            raise UsageError("simulate requires --process")
        if has_input:
            raise UsageError("simulate takes no --input")
    else:
        if has_input == has_process:
            raise UsageError(
                "exactly one data source is required: --input FILE or --process NAME"
            )
    for name in ("q_max", "scale", "delta"):
        if cfg.settings[name] is not None and not cfg.settings[name] > 0:
            raise UsageError(f"{name} must be positive")
    for name in ("num_q", "s_grid", "n", "substeps", "stride", "min_blocks"):
        if cfg.settings[name] is not None and cfg.settings[name] < 1:
            raise UsageError(f"{name} must be at least 1")
    if cfg.s_grid < 2:
        raise UsageError("s_grid must be at least 2")


_PROCESS_REQUIRED = {
    "iid_stable": ("alpha",),
    "iid_student": ("nu",),
    "iid_normal": (),
    "pareto_f1": (),
    "f2": (),
    "ou_stable": ("alpha", "lam"),
    "student_diffusion": ("nu", "theta"),
}

_PROCESS_PARAMS = {
    "iid_stable": ("alpha", "beta", "scale", "location"),
    "iid_student": ("nu", "delta", "mu"),
    "iid_normal": ("location", "scale"),
    "pareto_f1": (),
    "f2": (),
    "ou_stable": ("alpha", "lam"),
    "student_diffusion": ("nu", "delta", "mu", "theta"),
}


def build_simulation_spec(cfg: RunConfig) -> SimulationSpec:
    process = cfg.process
    for name in _PROCESS_REQUIRED[process]:
        if cfg.settings[name] is None:
            raise UsageError(f"process {process} requires --{name.replace('_', '-')}")
    params = {name: cfg.settings[name] for name in _PROCESS_PARAMS[process]}
    return SimulationSpec(
        process=process, n=cfg.n, params=params,
        substeps=cfg.substeps, burn_in=cfg.burn_in,
    )


def ingest_csv(path, column: str | None = None) -> TimeSeries:
    """Read one numeric column from a CSV file, in file order.

    The header row is auto-detected (a first row with any non-numeric cell).
    ``column`` selects by header name or zero-based index; it may be omitted
    for single-column files. Unparseable or non-finite cells are reported
    with their line number.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise DataError(f"cannot read {path}: {err}") from err
    rows = [(lineno, row) for lineno, row in
            enumerate(csv.reader(io.StringIO(text)), start=1) if row]
    if not rows:
        raise DataError(f"{path}: file contains no data")

    def _is_number(cell: str) -> bool:
        try:
            float(cell)
        except ValueError:
            return False
        return True

    first_row = rows[0][1]
    has_header = not all(_is_number(cell) for cell in first_row)
    header = [cell.strip() for cell in first_row] if has_header else None
    data_rows = rows[1:] if has_header else rows
    if not data_rows:
        raise DataError(f"{path}: no data rows below the header")

    width = len(first_row)
    if column is None:
        if width != 1:
            raise DataError(f"{path}: {width} columns present; select one with --column")
        index = 0
    elif header is not None and column in header:
        index = header.index(column)
    else:
        try:
            index = int(column)
        except ValueError:
            raise DataError(f"{path}: no column named {column!r}") from None
        if not 0 <= index < width:
            raise DataError(f"{path}: column index {index} out of range (0..{width - 1})")

    values = []
    for lineno, row in data_rows:
        if index >= len(row):
            raise DataError(f"{path}: row {lineno}: missing column {column or index}")
        cell = row[index].strip()
        try:
            value = float(cell)
        except ValueError:
            raise DataError(f"{path}: row {lineno}: could not parse {cell!r}") from None
        if not math.isfinite(value):
            raise DataError(f"{path}: row {lineno}: non-finite value {cell!r}")
        values.append(value)
    if not values:
        raise DataError(f"{path}: empty column")
    return TimeSeries(values=np.array(values), source=str(path))


def _load_series(cfg: RunConfig) -> TimeSeries:
    if cfg.input is not None:
        series = ingest_csv(cfg.input, cfg.column)
    else:
        series = run_simulation(build_simulation_spec(cfg), cfg.seed, cfg.stream)
    if cfg.demean and cfg.command != "simulate":
        series = demean(series)
    return series


def _fmt_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def _write_csv(path: Path, header: list[str], columns: list) -> None:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(_fmt_value(v) for v in row))
    _write_atomic(path, "\n".join(lines) + "\n")


def _write_report(path: Path, pairs: list[tuple[str, object]]) -> None:
    lines = ["key,value"]
    for key, value in pairs:
        lines.append(f"{key},{_fmt_value(value)}")
    _write_atomic(path, "\n".join(lines) + "\n")


def _echo_pairs(cfg: RunConfig, series: TimeSeries | None) -> list[tuple[str, object]]:
    pairs = [("command", cfg.command)]
    for name in sorted(_OPTIONS):
        if name == "out":
            continue  # artifact location, not provenance of the result
        pairs.append((name, cfg.settings[name]))
    if series is not None:
        pairs.append(("n_observations", series.n))
        pairs.append(("source", series.source))
    return pairs


def _default_k_range(n: int, cfg: RunConfig) -> tuple[int, int]:
    k_min = cfg.k_min if cfg.k_min is not None else min(10, max(1, n - 2))
    k_max = cfg.k_max if cfg.k_max is not None else max(k_min + 1, n // 2)
    k_max = min(k_max, n - 1)
    return k_min, k_max


def run_simulate(cfg: RunConfig) -> list[Path]:
    series = run_simulation(build_simulation_spec(cfg), cfg.seed, cfg.stream)
    out = Path(cfg.out) / "series.csv"
    _write_csv(out, ["value"], [series.values.tolist()])
    return [out]


def run_scaling(cfg: RunConfig) -> list[Path]:
    series = _load_series(cfg)
    curve = build_scaling_curve(series, default_q_grid(cfg.q_max, cfg.num_q), cfg.s_grid,
                                min_blocks=cfg.min_blocks)
    q = curve.q_values
    baseline = q / 2.0
    header = ["q", "tau_hat", "baseline"]
    columns = [q.tolist(), curve.tau_hat.tolist(), baseline.tolist()]
    overlay = None
    if cfg.overlay_alpha is not None:
        overlay = float(cfg.overlay_alpha)
    elif cfg.overlay_fit:
        overlay = fit_tail_index(curve, branch=cfg.branch).alpha_hat
    curves = [("empirical", q, curve.tau_hat, "dotted"),
              ("baseline q/2", q, baseline, "dashdot")]
    if overlay is not None:
        asymptotic = np.array([asymptotic_scaling_function(overlay, float(v)) for v in q])
        header.append("asymptotic")
        columns.append(asymptotic.tolist())
        curves.insert(1, (f"asymptotic (alpha={overlay:.4g})", q, asymptotic, "solid"))
    artifacts = []
    csv_path = Path(cfg.out) / "scaling_curve.csv"
    _write_csv(csv_path, header, columns)
    artifacts.append(csv_path)
    if cfg.format in ("svg", "both"):
        svg_path = Path(cfg.out) / "scaling_plot.svg"
        _write_atomic(svg_path, line_plot(
            curves, title="Empirical scaling function",
            x_label="moment order q", y_label="scaling function",
        ))
        artifacts.append(svg_path)
    return artifacts


def run_estimate(cfg: RunConfig) -> list[Path]:
    series = _load_series(cfg)
    out = Path(cfg.out) / "estimate.csv"
    pairs = _echo_pairs(cfg, series)
    try:
        curve = build_scaling_curve(series, default_q_grid(cfg.q_max, cfg.num_q), cfg.s_grid,
                                min_blocks=cfg.min_blocks)
        estimate = fit_tail_index(curve, branch=cfg.branch)
    except EstimationError as err:
        pairs.append(("error", str(err)))
        _write_report(out, pairs)
        raise
    pairs.extend([
        ("alpha_hat", estimate.alpha_hat),
        ("branch_used", estimate.branch),
        ("sse", estimate.sse),
        ("sse_other", estimate.branch_sse_other),
        ("inconclusive", estimate.inconclusive),
        ("boundary_warning", estimate.boundary_warning),
        ("skipped_cells", int(curve.skipped_cells.sum())),
    ])
    _write_report(out, pairs)
    return [out]


def run_trace(cfg: RunConfig) -> list[Path]:
    series = _load_series(cfg)
    k_min, k_max = _default_k_range(series.n, cfg)
    trace = estimator_trace(
        series, cfg.estimator, k_min, k_max, stride=cfg.stride,
        absolute=cfg.absolute, formula=cfg.formula,
    )
    artifacts = []
    csv_path = Path(cfg.out) / "trace.csv"
    _write_csv(csv_path, ["k", "estimate"], [trace.ks.tolist(), trace.estimates.tolist()])
    artifacts.append(csv_path)
    if cfg.format in ("svg", "both"):
        label = "Hill tail index" if trace.mode == "alpha" else "moment extreme value index"
        svg_path = Path(cfg.out) / "trace_plot.svg"
        _write_atomic(svg_path, line_plot(
            [(cfg.estimator, trace.ks, trace.estimates, "solid")],
            title=f"{label} against k",
            x_label="number of upper order statistics k", y_label="estimate",
        ))
        artifacts.append(svg_path)
    return artifacts


def run_qq(cfg: RunConfig) -> list[Path]:
    series = _load_series(cfg)
    k = cfg.k if cfg.k is not None else min(500, series.n)
    points = qq_points(series, k, absolute=cfg.absolute)
    artifacts = []
    csv_path = Path(cfg.out) / "qq.csv"
    _write_csv(csv_path, ["exp_quantile", "log_value"],
               [points[:, 0].tolist(), points[:, 1].tolist()])
    artifacts.append(csv_path)
    if cfg.format in ("svg", "both"):
        svg_path = Path(cfg.out) / "qq_plot.svg"
        _write_atomic(svg_path, line_plot(
            [("order statistics", points[:, 0], points[:, 1], "points")],
            title=f"QQ plot of log data on exponential quantiles (k={k})",
            x_label="-ln(i/(k+1))", y_label="ln of i-th largest value",
        ))
        artifacts.append(svg_path)
    return artifacts


def run_compare(cfg: RunConfig) -> list[Path]:
    series = _load_series(cfg)
    k_min, k_max = _default_k_range(series.n, cfg)
    methods = []
    failures = 0

    try:
        curve = build_scaling_curve(series, default_q_grid(cfg.q_max, cfg.num_q), cfg.s_grid,
                                min_blocks=cfg.min_blocks)
        fit = fit_tail_index(curve, branch=cfg.branch)
        methods.append({
            "method": "scaling_fit", "estimate": fit.alpha_hat, "kind": "alpha",
            "alpha_hat": fit.alpha_hat, "branch": fit.branch, "sse": fit.sse,
            "sse_other": fit.branch_sse_other, "inconclusive": fit.inconclusive,
        })
    except EstimationError as err:
        failures += 1
        methods.append({"method": "scaling_fit", "error": str(err)})

    for name in ("hill", "moment"):
        try:
            trace = estimator_trace(series, name, k_min, k_max, stride=cfg.stride,
                                    absolute=cfg.absolute, formula=cfg.formula)
            median = float(np.median(trace.estimates))
            row = {
                "method": f"{name}_median", "estimate": median,
                "kind": trace.mode, "k_min": k_min, "k_max": k_max,
            }
            if trace.mode == "evi":
                row["alpha_hat"] = 1.0 / median if median > 0 else None
            else:
                row["alpha_hat"] = median
            methods.append(row)
        except (EstimationError, ValueError) as err:
            failures += 1
            methods.append({"method": f"{name}_median", "error": str(err)})

    fields = ["method", "estimate", "kind", "alpha_hat", "k_min", "k_max",
              "branch", "sse", "sse_other", "inconclusive", "error"]
    lines = [",".join(fields)]
    for row in methods:
        lines.append(",".join(_fmt_value(row.get(f)) for f in fields))
    out = Path(cfg.out) / "compare.csv"
    _write_atomic(out, "\n".join(lines) + "\n")
    if failures:
        raise EstimationError(f"{failures} estimator(s) failed; see {out}")
    return [out]


_RUNNERS = {
    "simulate": run_simulate,
    "scaling": run_scaling,
    "estimate": run_estimate,
    "trace": run_trace,
    "qq": run_qq,
    "compare": run_compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailblocks",
        description="Heavy-tail inference from block partition functions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    io_parent = argparse.ArgumentParser(add_help=False)
    io_parent.add_argument("--out", help="output directory (default: current)")
    io_parent.add_argument("--format", choices=["csv", "svg", "both"],
                           help="artifact formats (default both)")
    io_parent.add_argument("--seed", type=int, help="random seed (default 0; "
                           f"env {SEED_ENV_VAR} overrides the default)")
    io_parent.add_argument("--stream", type=int, help="stream id for replicates (default 0)")
    io_parent.add_argument("--config", help="key=value config file; flags take precedence")

    sim_parent = argparse.ArgumentParser(add_help=False)
    sim_parent.add_argument("--process", choices=list(PROCESS_NAMES),
                            help="simulate the sample from this process")
    sim_parent.add_argument("--n", type=int, help="number of observations (default 1000)")
    sim_parent.add_argument("--alpha", type=float, help="stable index")
    sim_parent.add_argument("--beta", type=float, help="stable skewness (default 0)")
    sim_parent.add_argument("--scale", type=float, help="scale parameter (default 1)")
    sim_parent.add_argument("--location", type=float, help="location parameter (default 0)")
    sim_parent.add_argument("--nu", type=float, help="Student tail parameter")
    sim_parent.add_argument("--delta", type=float, help="Student scale (default 1)")
    sim_parent.add_argument("--mu", type=float, help="Student location (default 0)")
    sim_parent.add_argument("--lam", type=float, help="OU mean-reversion rate")
    sim_parent.add_argument("--theta", type=float, help="diffusion mean-reversion rate")
    sim_parent.add_argument("--substeps", type=int, help="SDE steps per observation (default 100)")
    sim_parent.add_argument("--burn-in", type=int, dest="burn_in",
                            help="retained observations to discard (default 10/rate)")

    source_parent = argparse.ArgumentParser(add_help=False)
    source_parent.add_argument("--input", help="CSV file to analyze")
    source_parent.add_argument("--column", help="column name or zero-based index")
    source_parent.add_argument("--demean", action=argparse.BooleanOptionalAction,
                               default=None,
                               help="subtract the sample mean first (default on; "
                                    "--no-demean for tail index <= 1 workflows)")

    qgrid_parent = argparse.ArgumentParser(add_help=False)
    qgrid_parent.add_argument("--q-max", type=float, dest="q_max",
                              help="largest moment order (default 8)")
    qgrid_parent.add_argument("--num-q", type=int, dest="num_q",
                              help="number of moment orders (default 40)")
    qgrid_parent.add_argument("--s-grid", type=int, dest="s_grid",
                              help="block-exponent grid divisions N; regression uses "
                                   "N-1 points (default 20)")
    qgrid_parent.add_argument("--min-blocks", type=int, dest="min_blocks",
                              help="skip grid cells with fewer blocks than this "
                                   "(default 5; 1 uses every cell)")

    branch_parent = argparse.ArgumentParser(add_help=False)
    branch_parent.add_argument("--branch", choices=["auto", "le2", "gt2"],
                               help="model branch for the tail-index fit (default auto)")

    korder_parent = argparse.ArgumentParser(add_help=False)
    korder_parent.add_argument("--k-min", type=int, dest="k_min",
                               help="smallest k (default 10)")
    korder_parent.add_argument("--k-max", type=int, dest="k_max",
                               help="largest k (default n/2)")
    korder_parent.add_argument("--stride", type=int, help="k step (default 1)")
    korder_parent.add_argument("--absolute", action=argparse.BooleanOptionalAction,
                               default=None, help="rank by absolute value")
    korder_parent.add_argument("--formula", choices=["standard", "as-printed"],
                               help="moment-estimator variant (default standard)")

    sub.add_parser("simulate", parents=[io_parent, sim_parent],
                   help="write a simulated series to series.csv")
    scaling_cmd = sub.add_parser(
        "scaling", parents=[io_parent, sim_parent, source_parent, qgrid_parent, branch_parent],
        help="empirical scaling function with baseline (and optional model overlay)")
    scaling_cmd.add_argument("--overlay-alpha", type=float, dest="overlay_alpha",
                             help="overlay the asymptotic curve for this tail index")
    scaling_cmd.add_argument("--overlay-fit", action=argparse.BooleanOptionalAction,
                             default=None, dest="overlay_fit",
                             help="estimate the tail index and overlay its curve")
    sub.add_parser("estimate", parents=[io_parent, sim_parent, source_parent,
                                        qgrid_parent, branch_parent],
                   help="scaling-function tail-index estimate report")
    trace_cmd = sub.add_parser("trace", parents=[io_parent, sim_parent, source_parent,
                                                 korder_parent],
                               help="Hill or moment estimates against k")
    trace_cmd.add_argument("--estimator", choices=["hill", "moment"],
                           help="which estimator to trace (default hill)")
    qq_cmd = sub.add_parser("qq", parents=[io_parent, sim_parent, source_parent],
                            help="QQ plot of log data on exponential quantiles")
    qq_cmd.add_argument("--k", type=int, help="number of upper order statistics "
                                              "(default min(500, n))")
    qq_cmd.add_argument("--absolute", action=argparse.BooleanOptionalAction,
                        default=None, help="rank by absolute value")
    sub.add_parser("compare", parents=[io_parent, sim_parent, source_parent,
                                       qgrid_parent, branch_parent, korder_parent],
                   help="scaling fit, Hill and moment summaries side by side")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_call:
        return int(exit_call.code or 0)
    try:
        cfg = resolve_config(args)
        artifacts = _RUNNERS[cfg.command](cfg)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as err:
        print(f"data error: {err}", file=sys.stderr)
        return EXIT_DATA
    except EstimationError as err:
        print(f"estimation failure: {err}", file=sys.stderr)
        return EXIT_ESTIMATION
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    for path in artifacts:
        print(path)
    return EXIT_OK


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
